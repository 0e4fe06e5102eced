from setuptools import find_packages, setup

setup(
    name='padic-rds',
    version='0.1.0',
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={
      "padic_rds": ["resources/*"]
    },
    install_requires=[
        'opentelemetry-sdk>=1.28.1' ,
        'opentelemetry-exporter-otlp-proto-grpc>=1.28.1',
        'pyyaml>=6.0.2',
        "pydantic>=2.10.4",
        "networkx>=3.4.2",
        "numpy>=1.26",
        "scipy>=1.11",
        "sympy>=1.12",
        "pandas>=1.5",
    ],
    extras_require={
        'test': [
            'pytest>=8.3.4',
        ],
    },
    entry_points={
        'console_scripts': [
            'padic-rds=padic_rds.cli:main',
        ],
    },
    python_requires='>=3.9',
)
