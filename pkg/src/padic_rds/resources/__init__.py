# Make resources a Python package
