#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages
import os

# 读取README文件
def read_readme():
    if os.path.exists("README.md"):
        with open("README.md", "r", encoding="utf-8") as fh:
            return fh.read()
    return "KCSM Lab - 动力学约束自旋模型实验室"

# 运行依赖 (requirements.txt 中的测试工具不计入)
def read_requirements():
    runtime = ("numpy", "scipy", "PyYAML", "psutil")
    if os.path.exists("requirements.txt"):
        with open("requirements.txt", "r", encoding="utf-8") as fh:
            return [line.strip() for line in fh
                    if line.strip() and not line.startswith("#") and line.startswith(runtime)]
    return ["numpy>=1.20.0", "scipy>=1.8.0", "PyYAML>=6.0", "psutil>=5.8.0"]

setup(
    name="kcsm-lab",
    version="1.0.0",
    author="KCSM Lab Team",
    description="动力学约束自旋模型实验室：精确谱隙、蒙特卡罗动力学、自举渗流与谱隙不等式检查",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["kcsm_lab", "kcsm_lab.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    install_requires=read_requirements(),
    extras_require={
        "dev": ["pytest>=7.0.0", "pytest-cov>=4.0.0", "hypothesis>=6.0", "flake8", "black", "isort"],
    },
    include_package_data=True,
    package_data={
        "kcsm_lab": ["data/*.json"],
    },
    entry_points={
        "console_scripts": ["kcsm-lab=kcsm_lab.cli:main"],
    },
    keywords="kinetically constrained models, spectral gap, bootstrap percolation, 动力学约束模型",
)
