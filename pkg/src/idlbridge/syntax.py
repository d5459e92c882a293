"""Syntax tree for the bridge IDL.

Every node carries a source span for diagnostics.  Spans are excluded from
equality so that a tree parsed back from its own pretty-printing compares
equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PRIMITIVES = ("int", "double", "boolean", "string", "void")

KEYWORDS = frozenset(
    {"package", "class", "interface", "extends", "implements", *PRIMITIVES}
)

ATTRIBUTE_KEYS = frozenset({"name", "callback", "assembly"})

# Java-style primitive names the IDL deliberately does not support; flagged
# with a targeted message instead of surfacing later as an unresolved name.
UNSUPPORTED_PRIMITIVES = frozenset({"bool", "byte", "char", "float", "long", "short"})


@dataclass(frozen=True)
class SourceSpan:
    line: int = 1
    column: int = 1
    length: int = 1


_NO_SPAN = SourceSpan()


@dataclass
class SyntaxDiagnostic:
    message: str
    span: SourceSpan

    def render(self, path: str = "<idl>") -> str:
        return f"{path}:{self.span.line}:{self.span.column}: error: {self.message}"


class IdlSyntaxError(Exception):
    """Raised by parse_idl; carries every diagnostic collected during the parse."""

    def __init__(self, diagnostics: list[SyntaxDiagnostic], path: str = "<idl>"):
        self.diagnostics = diagnostics
        self.path = path
        super().__init__("\n".join(d.render(path) for d in diagnostics))


@dataclass
class Attribute:
    key: str
    value: str | None = None
    span: SourceSpan = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class TypeRef:
    kind: str  # one of PRIMITIVES or "named"
    name: str | None = None

    def __str__(self) -> str:
        return self.name if self.kind == "named" else self.kind

    @property
    def is_void(self) -> bool:
        return self.kind == "void"


INT = TypeRef("int")
DOUBLE = TypeRef("double")
BOOLEAN = TypeRef("boolean")
STRING = TypeRef("string")
VOID = TypeRef("void")


def named(name: str) -> TypeRef:
    return TypeRef("named", name)


@dataclass
class FieldDecl:
    type: TypeRef
    name: str
    span: SourceSpan = field(default=_NO_SPAN, compare=False)


@dataclass
class CtorSig:
    attributes: list[Attribute]
    params: list[TypeRef]
    span: SourceSpan = field(default=_NO_SPAN, compare=False)

    @property
    def alias(self) -> str:
        for a in self.attributes:
            if a.key == "name" and a.value:
                return a.value
        raise ValueError("constructor has no name alias")


@dataclass
class MethodSig:
    attributes: list[Attribute]
    return_type: TypeRef
    name: str
    params: list[TypeRef]
    span: SourceSpan = field(default=_NO_SPAN, compare=False)

    @property
    def alias(self) -> str:
        for a in self.attributes:
            if a.key == "name" and a.value:
                return a.value
        return self.name


@dataclass
class ClassDecl:
    attributes: list[Attribute]
    name: str
    extends: str | None
    implements: list[str]
    fields: list[FieldDecl]
    ctors: list[CtorSig]
    methods: list[MethodSig]
    span: SourceSpan = field(default=_NO_SPAN, compare=False)

    @property
    def callback(self) -> bool:
        return any(a.key == "callback" for a in self.attributes)


@dataclass
class InterfaceDecl:
    name: str
    methods: list[MethodSig]
    span: SourceSpan = field(default=_NO_SPAN, compare=False)


@dataclass
class IdlFile:
    package: str
    package_attributes: list[Attribute]
    classes: list[ClassDecl]
    interfaces: list[InterfaceDecl]


def declarations(file: IdlFile) -> list[ClassDecl | InterfaceDecl]:
    """Classes and interfaces merged back into source order.

    Parsed trees interleave by span; trees built in memory (where spans are
    defaults) fall back to classes-then-interfaces, which is still stable.
    """
    tagged = [(d.span.line, d.span.column, 0, i, d) for i, d in enumerate(file.classes)]
    tagged += [
        (d.span.line, d.span.column, 1, i, d) for i, d in enumerate(file.interfaces)
    ]
    tagged.sort(key=lambda t: t[:4])
    return [t[4] for t in tagged]
