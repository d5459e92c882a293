"""Tokenizer for the bridge IDL.

Produces identifier, keyword, punctuation and ``<init>`` tokens with 1-based
line/column positions.  ``//`` comments run to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import KEYWORDS, SourceSpan, SyntaxDiagnostic

PUNCTUATION = "{}()[],;"

EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "init", a punctuation character, or EOF
    value: str
    span: SourceSpan


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> tuple[list[Token], list[SyntaxDiagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[SyntaxDiagnostic] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance()
            continue
        if c == "/" and source[i : i + 2] == "//":
            while i < n and source[i] != "\n":
                advance()
            continue
        start = SourceSpan(line, col, 1)
        if c == "<":
            # The only legal '<...>' token is the constructor marker.
            if source[i : i + 6] == "<init>":
                tokens.append(Token("init", "<init>", SourceSpan(line, col, 6)))
                advance(6)
            else:
                diagnostics.append(
                    SyntaxDiagnostic("expected '<init>' after '<'", start)
                )
                advance()
            continue
        if c in PUNCTUATION:
            tokens.append(Token(c, c, start))
            advance()
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            span = SourceSpan(line, col, len(text))
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span))
            advance(len(text))
            continue
        diagnostics.append(SyntaxDiagnostic(f"unexpected character {c!r}", start))
        advance()

    tokens.append(Token(EOF, "", SourceSpan(line, col, 1)))
    return tokens, diagnostics
