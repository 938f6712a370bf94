from setuptools import find_packages, setup

setup(
    name="topp-hmm",
    version="1.0.0",
    description="Top-p truncated hidden Markov models with sparse inference and error bounds",
    packages=find_packages(exclude=["app.tests", "app.tests.*"]),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pandas",
        "fastapi",
        "uvicorn",
        "python-dotenv",
        "pydantic",
        "pydantic_settings",
    ],
    extras_require={
        "test": ["pytest", "hypothesis", "httpx"],
    },
    entry_points={
        "console_scripts": ["topp-hmm=app.cli:main"],
    },
)
