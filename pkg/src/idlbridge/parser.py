"""Recursive-descent parser for the bridge IDL.

Collects as many diagnostics as it can (panic-mode recovery at member and
declaration boundaries) and raises IdlSyntaxError if any were produced.
"""

from __future__ import annotations

from .lexer import EOF, Token, tokenize
from .syntax import (
    ATTRIBUTE_KEYS,
    PRIMITIVES,
    UNSUPPORTED_PRIMITIVES,
    Attribute,
    ClassDecl,
    CtorSig,
    FieldDecl,
    IdlFile,
    IdlSyntaxError,
    InterfaceDecl,
    MethodSig,
    SourceSpan,
    SyntaxDiagnostic,
    TypeRef,
    named,
)

_TYPE_KEYWORDS = frozenset(PRIMITIVES)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[SyntaxDiagnostic] = []

    # ---- token plumbing ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def advance(self) -> Token:
        t = self.tok
        if t.kind != EOF:
            self.pos += 1
        return t

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.advance()
        return None

    def error(self, message: str, span: SourceSpan | None = None) -> None:
        self.diagnostics.append(SyntaxDiagnostic(message, span or self.tok.span))

    def expect(self, kind: str, value: str | None = None, what: str = "") -> Token | None:
        t = self.accept(kind, value)
        if t is None:
            expected = what or (value if value else kind)
            self.error(f"expected {expected}, found {self._describe(self.tok)}")
        return t

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == EOF else f"'{t.value}'"

    def skip_to(self, stop_kinds: frozenset[str]) -> None:
        while self.tok.kind != EOF and self.tok.kind not in stop_kinds:
            if self.tok.kind == "kw" and self.tok.value in ("class", "interface"):
                return
            self.advance()

    # ---- attributes -------------------------------------------------------

    def parse_attr_groups(self) -> list[Attribute]:
        attrs: list[Attribute] = []
        while self.at("["):
            self.advance()
            key_tok = self.tok
            if key_tok.kind not in ("ident", "kw"):
                self.error("expected attribute key inside '[...]'")
                self.skip_to(frozenset("]"))
                self.accept("]")
                continue
            self.advance()
            key = key_tok.value
            value: str | None = None
            if self.tok.kind in ("ident", "kw") and not self.at("]"):
                value = self.advance().value
            self.expect("]", what="']' closing the attribute")
            if key not in ATTRIBUTE_KEYS:
                self.error(f"unknown attribute key '{key}'", key_tok.span)
                continue
            if key == "callback" and value is not None:
                self.error("attribute 'callback' takes no value", key_tok.span)
                value = None
            if key in ("name", "assembly") and value is None:
                self.error(f"attribute '{key}' requires a value", key_tok.span)
                continue
            if any(a.key == key for a in attrs):
                self.error(f"duplicate attribute '{key}'", key_tok.span)
                continue
            attrs.append(Attribute(key, value, key_tok.span))
        return attrs

    def check_attrs(self, attrs: list[Attribute], allowed: frozenset[str], where: str) -> list[Attribute]:
        kept = []
        for a in attrs:
            if a.key in allowed:
                kept.append(a)
            else:
                self.error(f"attribute '{a.key}' is not allowed on {where}", a.span)
        return kept

    # ---- types ------------------------------------------------------------

    def parse_type(self) -> TypeRef | None:
        t = self.tok
        if t.kind == "kw" and t.value in _TYPE_KEYWORDS:
            self.advance()
            return TypeRef(t.value)
        if t.kind == "ident":
            self.advance()
            if t.value in UNSUPPORTED_PRIMITIVES:
                self.error(f"unknown primitive type '{t.value}'", t.span)
                return None
            return named(t.value)
        self.error(f"expected a type, found {self._describe(t)}")
        return None

    def parse_params(self) -> list[TypeRef]:
        params: list[TypeRef] = []
        self.expect("(", what="'('")
        if self.at(")"):
            self.advance()
            return params
        while True:
            span = self.tok.span
            ty = self.parse_type()
            if ty is not None:
                if ty.is_void:
                    self.error("'void' is not a valid parameter type", span)
                else:
                    params.append(ty)
            if self.accept(","):
                continue
            break
        self.expect(")", what="')' closing the parameter list")
        return params

    def ident(self, what: str) -> Token | None:
        t = self.tok
        if t.kind == "ident":
            if t.value in UNSUPPORTED_PRIMITIVES:
                # tolerated as a plain identifier; only type positions reject these
                pass
            return self.advance()
        if t.kind == "kw":
            self.error(f"'{t.value}' is a reserved word and cannot be used as {what}")
            self.advance()
            return None
        self.error(f"expected {what}, found {self._describe(t)}")
        return None

    # ---- member terminators -----------------------------------------------

    def member_semicolon(self) -> None:
        # A semicolon is required except immediately before the closing brace,
        # where it may be omitted.
        if self.accept(";"):
            return
        if self.at("}"):
            return
        self.error(f"missing ';' after declaration, found {self._describe(self.tok)}")
        self.skip_to(frozenset({";", "}"}))
        self.accept(";")

    # ---- declarations -----------------------------------------------------

    def parse_file(self) -> IdlFile:
        pkg_tok = self.expect("kw", "package", what="'package' declaration first")
        if pkg_tok is None:
            return IdlFile("", [], [], [])
        pkg_attrs = self.check_attrs(
            self.parse_attr_groups(), frozenset({"assembly"}), "the package declaration"
        )
        name_tok = self.ident("the package name")
        package = name_tok.value if name_tok else ""
        self.expect(";", what="';' after the package declaration")

        classes: list[ClassDecl] = []
        interfaces: list[InterfaceDecl] = []
        while self.tok.kind != EOF:
            attrs = self.parse_attr_groups()
            if self.accept("kw", "class"):
                decl = self.parse_class(attrs)
                if decl is not None:
                    classes.append(decl)
            elif self.at("kw", "interface"):
                kw = self.advance()
                self.check_attrs(attrs, frozenset(), "an interface declaration")
                decl = self.parse_interface(kw)
                if decl is not None:
                    interfaces.append(decl)
            elif self.at("kw", "package"):
                self.error("duplicate package declaration")
                self.advance()
                self.skip_to(frozenset({";"}))
                self.accept(";")
            elif self.at("init"):
                self.error("'<init>' is only allowed inside a class")
                self.advance()
                self.skip_to(frozenset({";"}))
                self.accept(";")
            else:
                self.error(
                    f"expected 'class' or 'interface', found {self._describe(self.tok)}"
                )
                self.advance()
                self.skip_to(frozenset())
        return IdlFile(package, pkg_attrs, classes, interfaces)

    def parse_class(self, attrs: list[Attribute]) -> ClassDecl | None:
        attrs = self.check_attrs(attrs, frozenset({"callback"}), "a class declaration")
        name_tok = self.ident("the class name")
        if name_tok is None:
            self.skip_to(frozenset({"{"}))
        extends: str | None = None
        if self.accept("kw", "extends"):
            t = self.ident("the superclass name")
            extends = t.value if t else None
        implements: list[str] = []
        if self.accept("kw", "implements"):
            while True:
                t = self.ident("an interface name")
                if t is not None:
                    if t.value in implements:
                        self.error(f"duplicate interface '{t.value}' in implements list", t.span)
                    else:
                        implements.append(t.value)
                if not self.accept(","):
                    break
        if self.expect("{", what="'{' opening the class body") is None:
            return None

        fields: list[FieldDecl] = []
        ctors: list[CtorSig] = []
        methods: list[MethodSig] = []
        while not self.at("}"):
            if self.tok.kind == EOF:
                self.error("unterminated class body: missing '}'")
                return None
            self.parse_member(fields, ctors, methods)
        self.advance()
        if name_tok is None:
            return None
        return ClassDecl(
            attrs, name_tok.value, extends, implements, fields, ctors, methods, name_tok.span
        )

    def parse_member(
        self,
        fields: list[FieldDecl],
        ctors: list[CtorSig],
        methods: list[MethodSig],
    ) -> None:
        attrs = self.parse_attr_groups()
        if self.at("init"):
            init_tok = self.advance()
            attrs = self.check_attrs(attrs, frozenset({"name"}), "a constructor")
            params = self.parse_params()
            self.member_semicolon()
            if not any(a.key == "name" for a in attrs):
                self.error(
                    "constructor missing required 'name' alias attribute", init_tok.span
                )
                return
            ctors.append(CtorSig(attrs, params, init_tok.span))
            return
        type_span = self.tok.span
        ty = self.parse_type()
        name_tok = self.ident("a member name")
        if ty is None or name_tok is None:
            self.skip_to(frozenset({";", "}"}))
            self.accept(";")
            return
        if self.at("("):
            attrs = self.check_attrs(attrs, frozenset({"name"}), "a method")
            params = self.parse_params()
            self.member_semicolon()
            methods.append(MethodSig(attrs, ty, name_tok.value, params, name_tok.span))
        else:
            self.check_attrs(attrs, frozenset(), "a field")
            self.member_semicolon()
            if ty.is_void:
                self.error("'void' is not a valid field type", type_span)
                return
            fields.append(FieldDecl(ty, name_tok.value, name_tok.span))

    def parse_interface(self, kw: Token) -> InterfaceDecl | None:
        name_tok = self.ident("the interface name")
        if self.at("kw", "extends"):
            self.error("interfaces cannot extend other interfaces")
            self.advance()
            self.ident("a name")
        if self.expect("{", what="'{' opening the interface body") is None:
            return None
        methods: list[MethodSig] = []
        while not self.at("}"):
            if self.tok.kind == EOF:
                self.error("unterminated interface body: missing '}'")
                return None
            attrs = self.parse_attr_groups()
            if self.at("init"):
                self.error("'<init>' is only allowed inside a class")
                self.advance()
                self.skip_to(frozenset({";", "}"}))
                self.accept(";")
                continue
            ty = self.parse_type()
            m_tok = self.ident("a method name")
            if ty is None or m_tok is None:
                self.skip_to(frozenset({";", "}"}))
                self.accept(";")
                continue
            if not self.at("("):
                self.error("interfaces cannot declare fields", m_tok.span)
                self.skip_to(frozenset({";", "}"}))
                self.accept(";")
                continue
            attrs = self.check_attrs(attrs, frozenset({"name"}), "a method")
            params = self.parse_params()
            self.member_semicolon()
            methods.append(MethodSig(attrs, ty, m_tok.value, params, m_tok.span))
        self.advance()
        if name_tok is None:
            return None
        return InterfaceDecl(name_tok.value, methods, name_tok.span)


def parse_idl(source: str, path: str = "<idl>") -> IdlFile:
    """Parse IDL text into an IdlFile.

    Raises IdlSyntaxError carrying one SyntaxDiagnostic per error found; the
    parse is deterministic and diagnostics come out in source order.
    """
    tokens, diagnostics = tokenize(source)
    parser = _Parser(tokens)
    file = parser.parse_file()
    all_diags = sorted(
        diagnostics + parser.diagnostics, key=lambda d: (d.span.line, d.span.column)
    )
    if all_diags:
        raise IdlSyntaxError(all_diags, path)
    return file
