import io
import json

import pytest

from utils import *

from cuspres import __version__, report
from cuspres.resonance import Resonance

SCHEMA = json.loads((CUSPRES_ROOT / 'schema' / 'run.schema.json').read_text())
JSON_TYPES = {'number': (int, float), 'integer': (int,), 'string': (str,), 'null': (type(None),)}

RES = Resonance(20, 18.25 - 0.75j, 0.25, 4, 18.0 - 1.0j)


def matches_type(value, rule):
    if 'enum' in rule:
        return value in rule['enum']
    if 'const' in rule:
        return value == rule['const']
    kinds = rule['type'] if isinstance(rule['type'], list) else [rule['type']]
    return any(isinstance(value, JSON_TYPES[k]) and not isinstance(value, bool) for k in kinds)


def check_against_schema(document):
    for key in SCHEMA['required']:
        assert key in document
    assert set(document) <= set(SCHEMA['properties'])
    meta_schema = SCHEMA['properties']['meta']
    for key in meta_schema['required']:
        assert key in document['meta']
    for key, value in document['meta'].items():
        assert matches_type(value, meta_schema['properties'][key]), key
    row_schema = SCHEMA['properties']['rows']['items']['properties']
    for row in document['rows']:
        for key, value in row.items():
            assert matches_type(value, row_schema[key]), key


def test_format_number():
    assert report.format_number(7) == '7'
    assert report.format_number(0.1) == '0.10000000000000001'
    assert float(report.format_number(1 / 3)) == 1 / 3


def test_resonance_row():
    row = report.resonance_row(RES)
    assert list(row) == report.CSV_HEADER
    assert row['im_lambda'] == -0.75
    assert 'lambda_minus_seed_abs' not in row


def test_resonance_row_funnel_and_prefix():
    row = report.resonance_row(RES, funnel=True, prefix={'a': -1.0, 'b': 1.0})
    assert list(row)[:2] == report.FIGURE_PREFIX
    assert row['lambda_minus_seed_abs'] == pytest.approx(abs(0.25 + 0.25j))


def test_write_csv():
    out = io.StringIO()
    report.write_csv(out, report.CSV_HEADER, [report.resonance_row(RES)])
    header, rows = csv_rows(out.getvalue())
    assert header == report.CSV_HEADER
    assert rows == [{'k': '20', 're_lambda': '18.25', 'im_lambda': '-0.75', 'residual': '0.25',
                     'iterations': '4', 'seed_re': '18', 'seed_im': '-1'}]


def test_write_json_matches_schema():
    meta = {'kind': 'cusp-cone', 'a': -1.0, 'b': 1.0, 'm': 1.0, 'k_min': 10, 'k_max': 20, 'k_step': 10,
            'rel_tol': 1e-10, 'format': 'json', 'plot_path': None, 'threads': 1, 'output': None}
    out = io.StringIO()
    report.write_json(out, meta, [report.resonance_row(RES, funnel=True)])
    document = json.loads(out.getvalue())
    assert document['meta']['version'] == __version__
    assert document['rows'][0]['k'] == 20
    check_against_schema(document)


def test_write_svg(tmp_path):
    path = tmp_path / 'plot.svg'
    report.write_svg(str(path), {'first': [RES.lam, 30 - 0.9j], 'second': [40 - 0.5j]},
                     title='resonances', reference_levels=[-1.0, -0.5])
    text = path.read_text(encoding='utf-8')
    assert text.startswith('<svg')
    assert text.rstrip().endswith('</svg>')
    assert 'Re λ' in text
    assert 'Im λ' in text
    assert text.count('<circle') == 3
    assert text.count('stroke-dasharray') == 2
    assert 'second' in text


def test_write_svg_empty_series(tmp_path):
    path = tmp_path / 'empty.svg'
    report.write_svg(str(path), {'nothing': []})
    assert '<circle' not in path.read_text(encoding='utf-8')
