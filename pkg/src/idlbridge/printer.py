"""Canonical pretty-printer for IDL trees; the inverse of parse_idl."""

from __future__ import annotations

from .syntax import (
    Attribute,
    ClassDecl,
    CtorSig,
    FieldDecl,
    IdlFile,
    InterfaceDecl,
    MethodSig,
    TypeRef,
    declarations,
)

_INDENT = "    "


def _attrs(attributes: list[Attribute]) -> str:
    out = []
    for a in attributes:
        out.append(f"[{a.key}]" if a.value is None else f"[{a.key} {a.value}]")
    return "".join(f"{s} " for s in out)


def _params(params: list[TypeRef]) -> str:
    return ", ".join(str(p) for p in params)


def _field(f: FieldDecl) -> str:
    return f"{_INDENT}{f.type} {f.name};"


def _ctor(c: CtorSig) -> str:
    return f"{_INDENT}{_attrs(c.attributes)}<init> ({_params(c.params)});"


def _method(m: MethodSig) -> str:
    return f"{_INDENT}{_attrs(m.attributes)}{m.return_type} {m.name}({_params(m.params)});"


def _class(d: ClassDecl) -> list[str]:
    head = f"{_attrs(d.attributes)}class {d.name}"
    if d.extends:
        head += f" extends {d.extends}"
    if d.implements:
        head += " implements " + ", ".join(d.implements)
    lines = [head + " {"]
    lines += [_field(f) for f in d.fields]
    lines += [_ctor(c) for c in d.ctors]
    lines += [_method(m) for m in d.methods]
    lines.append("}")
    return lines


def _interface(d: InterfaceDecl) -> list[str]:
    lines = [f"interface {d.name} {{"]
    lines += [_method(m) for m in d.methods]
    lines.append("}")
    return lines


def format_idl(file: IdlFile) -> str:
    """Render an IdlFile as canonical IDL text that reparses to an equal tree."""
    lines = [f"package {_attrs(file.package_attributes)}{file.package};"]
    for decl in declarations(file):
        lines.append("")
        if isinstance(decl, ClassDecl):
            lines += _class(decl)
        else:
            lines += _interface(decl)
    return "\n".join(lines) + "\n"
