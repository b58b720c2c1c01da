from setuptools import setup, find_packages


setup(
    name="fractalcurv",
    version="0.1.0",
    description="Mean fractal curvatures of random self-similar sets, with a Monte Carlo CLI",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.9",
    packages=find_packages(include=["fractalcurv", "fractalcurv.*"]),
    install_requires=["click>=8", "rich", "numpy>=1.22", "scipy>=1.9", "numba>=0.56"],
    extras_require={"test": ["pytest>=7", "hypothesis>=6"]},
    entry_points={"console_scripts": ["fractalcurv=fractalcurv.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Environment :: Console",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Intended Audience :: Science/Research",
    ],
    include_package_data=True,
)
