"""Setup script for streamvb"""

from setuptools import setup, find_packages

setup(
    name="streamvb",
    version="0.1.0",
    description="Streaming variational Bayes with hierarchical power priors for drifting data streams",
    author="streamvb Team",
    packages=find_packages(include=["streamvb", "streamvb.*"]),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "scikit-learn>=1.2.0",
        "pydantic>=2.0.0",
        "pyyaml>=6.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "hypothesis>=6.80.0",
            "black>=23.0.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "streamvb=streamvb.main:main",
        ],
    },
)
