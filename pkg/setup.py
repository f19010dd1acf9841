"""
Setup script for Poisson Widths
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="poisson-widths",
    version="1.0.0",
    author="Galaxy",
    author_email="galaxy@example.com",
    description="广义 Poisson 核卷积类的宽度计算 - θ 根、宽度、认证阈值、SK 样条与 CVD 检验",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/galaxy/poisson-widths",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "click>=8.1.0",
        "networkx>=3.2",
        "numpy>=1.24",
        "scipy>=1.10",
        "mpmath>=1.3.0",
    ],
    extras_require={
        "dev": [
            "black>=24.0.0",
            "flake8>=7.0.0",
            "pytest>=8.0.0",
            "hypothesis>=6.90",
        ],
    },
    entry_points={
        "console_scripts": [
            "poisson-widths=poisson_widths.cli:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
)
