# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the strsolve string constraint solver."""

from ._core import ParseError, check, decode_string_literal, run_file, run_suite, tokenize

__all__ = ["ParseError", "check", "decode_string_literal", "run_file", "run_suite", "tokenize"]
