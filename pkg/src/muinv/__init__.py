"""Exact arithmetic for p-rational fields, uniform pro-p groups, Iwasawa growth and prime splitting."""

__version__ = "0.1.0"
