from setuptools import setup, find_packages

setup(
    name="cuspres",
    version="0.1.0",
    description="Scattering resonances of cusp-cone and funnel-cone surfaces of revolution",
    packages=find_packages(where="bin"),
    package_dir={"": "bin"},
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "scipy",
    ],
    entry_points={
        "console_scripts": [
            "runCuspRes=cuspres.main:main",
        ],
    },
)
