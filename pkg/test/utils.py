import contextlib
import os
import pathlib
import subprocess
import sys

import mpmath

CUSPRES_ROOT = pathlib.Path(__file__).resolve().parent.parent
RUN_SCRIPT = CUSPRES_ROOT / 'bin' / 'runCuspRes.py'

sys.path.insert(0, str(CUSPRES_ROOT / 'bin'))


@contextlib.contextmanager
def working_directory(path):
    """Changes working directory and returns to previous on exit."""
    prev_cwd = pathlib.Path.cwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(prev_cwd)


def run_cli(*args, env=None):
    """Runs runCuspRes.py with the given arguments and returns the completed process."""
    full_env = dict(os.environ)
    full_env.pop('CUSPRES_THREADS', None)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, str(RUN_SCRIPT)] + [str(a) for a in args],
                          capture_output=True, text=True, env=full_env)


def csv_rows(text):
    lines = text.strip('\n').split('\n')
    header = lines[0].split(',')
    return header, [dict(zip(header, line.split(','))) for line in lines[1:]]


def mp_kquot(nu, z, dps=50):
    """K'_nu(z) / K_nu(z) in multiprecision, from K' = -K_{nu-1} - (nu/z) K_nu."""
    with mpmath.workdps(dps):
        nu = mpmath.mpc(nu)
        z = mpmath.mpf(z)
        k = mpmath.besselk(nu, z)
        return complex(-mpmath.besselk(nu - 1, z) / k - nu / z)


def mp_iquot(nu, z, dps=50):
    """I'_nu(z) / I_nu(z) in multiprecision, from I' = I_{nu-1} - (nu/z) I_nu."""
    with mpmath.workdps(dps):
        nu = mpmath.mpc(nu)
        z = mpmath.mpf(z)
        return complex(mpmath.besseli(nu - 1, z) / mpmath.besseli(nu, z) - nu / z)


def mp_remainders(nu, z, dps=50, terms=200):
    """Brute-force sums 1+R1 .. 1+R4."""
    with mpmath.workdps(dps):
        nu = mpmath.mpc(nu)
        u = mpmath.mpf(z) ** 2 / 4
        sums = [mpmath.mpc(0)] * 4
        for k in range(terms):
            t1 = u ** k / (mpmath.factorial(k) * mpmath.rf(nu + 1, k))
            t2 = u ** k / (mpmath.factorial(k) * mpmath.rf(1 - nu, k))
            sums[0] += t1
            sums[1] += t2
            sums[2] += t1 * (nu + 2 * k) / nu
            sums[3] += t2 * (nu - 2 * k) / nu
        return [complex(s) for s in sums]


def mp_hquot(n, x, dps=50):
    """H2'_n(x) / H2_n(x) on the principal sheet."""
    with mpmath.workdps(dps):
        x = mpmath.mpc(x)
        h = mpmath.hankel2(n, x)
        dh = (mpmath.hankel2(n - 1, x) - mpmath.hankel2(n + 1, x)) / 2
        return complex(dh / h)


def mp_jquot(n, x, dps=50):
    with mpmath.workdps(dps):
        x = mpmath.mpc(x)
        return complex(mpmath.besselj(n - 1, x) / mpmath.besselj(n, x) - n / x)
