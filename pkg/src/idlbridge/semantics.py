"""Name resolution and class-graph construction.

The object model enforced here is the common core of the two worlds the
bridge connects: single inheritance, no overloading (same alias with a
different signature is an error unless renamed with ``[name]``), and
inheritance implying subtyping.  Method binding stays late; resolution only
fixes which declaration owns each exposed alias.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    ClassDecl,
    IdlFile,
    InterfaceDecl,
    MethodSig,
    SourceSpan,
    TypeRef,
    declarations,
)

# Diagnostic codes.
DUPLICATE_DECLARATION = "duplicate-declaration"
UNRESOLVED_EXTENDS = "unresolved-extends"
UNRESOLVED_IMPLEMENTS = "unresolved-implements"
EXTENDS_NOT_CLASS = "extends-not-class"
IMPLEMENTS_NOT_INTERFACE = "implements-not-interface"
INHERITANCE_CYCLE = "inheritance-cycle"
OVERLOAD_WITHOUT_ALIAS = "overload-without-alias"
DUPLICATE_ALIAS = "duplicate-alias"
DUPLICATE_CTOR_ALIAS = "duplicate-ctor-alias"
INTERFACE_UNIMPLEMENTED = "interface-unimplemented"
UNRESOLVED_TYPE = "unresolved-type"


@dataclass
class Diagnostic:
    severity: str  # "error" or "warning"
    code: str
    message: str
    span: SourceSpan

    def render(self, path: str = "<idl>") -> str:
        return (
            f"{path}:{self.span.line}:{self.span.column}: "
            f"{self.severity}: {self.code}: {self.message}"
        )


class ResolveError(Exception):
    """Raised by resolve; carries every error-severity Diagnostic found."""

    def __init__(self, diagnostics: list[Diagnostic], path: str = "<idl>"):
        self.diagnostics = diagnostics
        self.path = path
        super().__init__("\n".join(d.render(path) for d in diagnostics))


@dataclass
class ResolvedMethod:
    alias: str
    declared_name: str
    return_type: TypeRef
    params: tuple[TypeRef, ...]
    origin: str  # class or interface owning the collapsed declaration
    overridden: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class ClassNode:
    decl: ClassDecl
    parent: str | None
    interfaces: list[str]
    closure: list[ResolvedMethod] = field(default_factory=list)
    ctor_aliases: list[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.decl.name

    @property
    def callback(self) -> bool:
        return self.decl.callback


@dataclass
class InterfaceNode:
    decl: InterfaceDecl
    closure: list[ResolvedMethod] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.decl.name


@dataclass
class ClassGraph:
    package: str
    nodes: dict[str, ClassNode | InterfaceNode]
    roots: list[str]
    file: IdlFile

    def class_names(self) -> list[str]:
        return [d.name for d in declarations(self.file) if isinstance(d, ClassDecl)]

    def interface_names(self) -> list[str]:
        return [d.name for d in declarations(self.file) if isinstance(d, InterfaceDecl)]


def _sig(m: MethodSig) -> tuple:
    return (m.return_type, tuple(m.params))


def _resolved(m: MethodSig, origin: str, overridden: bool = False) -> ResolvedMethod:
    return ResolvedMethod(m.alias, m.name, m.return_type, tuple(m.params), origin, overridden)


class _Resolver:
    def __init__(self, file: IdlFile):
        self.file = file
        self.diagnostics: list[Diagnostic] = []
        self.nodes: dict[str, ClassNode | InterfaceNode] = {}

    def error(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("error", code, message, span))

    # ---- pass 1: declare names ---------------------------------------------

    def declare(self) -> None:
        for decl in declarations(self.file):
            if decl.name in self.nodes:
                self.error(
                    DUPLICATE_DECLARATION,
                    f"'{decl.name}' is declared more than once",
                    decl.span,
                )
                continue
            if isinstance(decl, ClassDecl):
                self.nodes[decl.name] = ClassNode(decl, decl.extends, list(decl.implements))
            else:
                self.nodes[decl.name] = InterfaceNode(decl)

    # ---- pass 2: edges -------------------------------------------------------

    def check_edges(self) -> None:
        for node in self.nodes.values():
            if not isinstance(node, ClassNode):
                continue
            decl = node.decl
            if node.parent is not None:
                target = self.nodes.get(node.parent)
                if target is None:
                    self.error(
                        UNRESOLVED_EXTENDS,
                        f"class '{decl.name}' extends unknown name '{node.parent}'",
                        decl.span,
                    )
                    node.parent = None
                elif isinstance(target, InterfaceNode):
                    self.error(
                        EXTENDS_NOT_CLASS,
                        f"class '{decl.name}' extends '{target.name}', which is an interface",
                        decl.span,
                    )
                    node.parent = None
            kept = []
            for iname in node.interfaces:
                target = self.nodes.get(iname)
                if target is None:
                    self.error(
                        UNRESOLVED_IMPLEMENTS,
                        f"class '{decl.name}' implements unknown name '{iname}'",
                        decl.span,
                    )
                elif isinstance(target, ClassNode):
                    self.error(
                        IMPLEMENTS_NOT_INTERFACE,
                        f"class '{decl.name}' implements '{iname}', which is a class",
                        decl.span,
                    )
                else:
                    kept.append(iname)
            node.interfaces = kept

    def check_cycles(self) -> set[str]:
        cyclic: set[str] = set()
        for name, node in self.nodes.items():
            if not isinstance(node, ClassNode):
                continue
            seen = {name}
            cur = node.parent
            while cur is not None:
                if cur in seen:
                    cyclic.add(name)
                    self.error(
                        INHERITANCE_CYCLE,
                        f"inheritance cycle through class '{name}'",
                        node.decl.span,
                    )
                    break
                seen.add(cur)
                parent = self.nodes.get(cur)
                cur = parent.parent if isinstance(parent, ClassNode) else None
        return cyclic

    # ---- pass 3: types -------------------------------------------------------

    def check_types(self) -> None:
        def check(ty: TypeRef, what: str, span: SourceSpan) -> None:
            if ty.kind == "named" and ty.name not in self.nodes:
                self.error(UNRESOLVED_TYPE, f"{what} has unresolved type '{ty.name}'", span)

        for decl in declarations(self.file):
            if isinstance(decl, ClassDecl):
                for f in decl.fields:
                    check(f.type, f"field '{decl.name}.{f.name}'", f.span)
                for c in decl.ctors:
                    for p in c.params:
                        check(p, f"constructor '{c.alias}' parameter", c.span)
                members = decl.methods
            else:
                members = decl.methods
            for m in members:
                check(m.return_type, f"method '{decl.name}.{m.name}' return", m.span)
                for p in m.params:
                    check(p, f"method '{decl.name}.{m.name}' parameter", m.span)

    # ---- pass 4: closures ------------------------------------------------------

    def interface_closure(self, node: InterfaceNode) -> list[ResolvedMethod]:
        out: dict[str, ResolvedMethod] = {}
        for m in node.decl.methods:
            prev = out.get(m.alias)
            if prev is not None:
                code = DUPLICATE_ALIAS if _sig_equal(prev, m) else OVERLOAD_WITHOUT_ALIAS
                self.error(
                    code,
                    f"interface '{node.name}' exposes alias '{m.alias}' more than once",
                    m.span,
                )
                continue
            out[m.alias] = _resolved(m, node.name)
        return list(out.values())

    def class_closure(self, node: ClassNode, done: dict[str, list[ResolvedMethod]]) -> list[ResolvedMethod]:
        decl = node.decl
        closure: dict[str, ResolvedMethod] = {}
        if node.parent is not None:
            for m in done.get(node.parent, []):
                closure[m.alias] = m

        for m in decl.methods:
            prev = closure.get(m.alias)
            if prev is None:
                closure[m.alias] = _resolved(m, decl.name)
            elif prev.origin == decl.name and not prev.overridden:
                code = DUPLICATE_ALIAS if _sig_equal(prev, m) else OVERLOAD_WITHOUT_ALIAS
                self.error(
                    code,
                    f"class '{decl.name}' exposes alias '{m.alias}' more than once; "
                    "use a [name ...] alias to disambiguate",
                    m.span,
                )
            elif _sig_equal(prev, m):
                closure[m.alias] = _resolved(m, decl.name, overridden=True)
            else:
                self.error(
                    OVERLOAD_WITHOUT_ALIAS,
                    f"method '{decl.name}.{m.name}' reuses inherited alias '{m.alias}' "
                    "with a different signature; use a [name ...] alias",
                    m.span,
                )

        # Interface methods join the closure; a conflicting signature means the
        # class cannot satisfy the interface.
        for iname in node.interfaces:
            inode = self.nodes.get(iname)
            if not isinstance(inode, InterfaceNode):
                continue
            for im in inode.closure:
                prev = closure.get(im.alias)
                if prev is None:
                    closure[im.alias] = ResolvedMethod(
                        im.alias, im.declared_name, im.return_type, im.params, iname
                    )
                elif (prev.return_type, prev.params) != (im.return_type, im.params):
                    self.error(
                        INTERFACE_UNIMPLEMENTED,
                        f"class '{decl.name}' does not implement '{iname}.{im.alias}' "
                        "with a matching signature",
                        decl.span,
                    )
        return list(closure.values())

    def build_closures(self, cyclic: set[str]) -> None:
        for node in self.nodes.values():
            if isinstance(node, InterfaceNode):
                node.closure = self.interface_closure(node)

        done: dict[str, list[ResolvedMethod]] = {}

        def build(name: str) -> None:
            if name in done or name in cyclic:
                return
            node = self.nodes[name]
            assert isinstance(node, ClassNode)
            if node.parent is not None and node.parent not in cyclic:
                build(node.parent)
            done[name] = self.class_closure(node, done)
            node.closure = done[name]

        for name, node in self.nodes.items():
            if isinstance(node, ClassNode):
                build(name)

    # ---- pass 5: constructors --------------------------------------------------

    def check_ctors(self) -> None:
        seen: dict[str, str] = {}
        for decl in declarations(self.file):
            if not isinstance(decl, ClassDecl):
                continue
            node = self.nodes.get(decl.name)
            if not isinstance(node, ClassNode):
                continue
            for c in decl.ctors:
                alias = c.alias
                if alias in seen:
                    self.error(
                        DUPLICATE_CTOR_ALIAS,
                        f"constructor alias '{alias}' in class '{decl.name}' already "
                        f"used by class '{seen[alias]}'; aliases are package-global",
                        c.span,
                    )
                    continue
                seen[alias] = decl.name
                node.ctor_aliases.append(alias)


def _sig_equal(prev: ResolvedMethod, m: MethodSig) -> bool:
    return (prev.return_type, prev.params) == _sig(m)


def resolve(file: IdlFile, path: str = "<idl>") -> ClassGraph:
    """Resolve a parsed IDL file into a ClassGraph.

    Raises ResolveError with the full diagnostic list if any rule is broken;
    on success every closure is override-collapsed and alias-unique.
    """
    r = _Resolver(file)
    r.declare()
    r.check_edges()
    cyclic = r.check_cycles()
    r.check_types()
    r.build_closures(cyclic)
    r.check_ctors()
    if r.diagnostics:
        raise ResolveError(r.diagnostics, path)
    roots = [
        d.name
        for d in declarations(file)
        if isinstance(d, ClassDecl) and d.extends is None
    ]
    return ClassGraph(file.package, r.nodes, roots, file)


def supertypes(graph: ClassGraph, name: str) -> set[str]:
    """Reflexive-transitive closure over extends/implements edges."""
    if name not in graph.nodes:
        raise KeyError(name)
    out: set[str] = set()
    stack = [name]
    while stack:
        cur = stack.pop()
        if cur in out:
            continue
        out.add(cur)
        node = graph.nodes[cur]
        if isinstance(node, ClassNode):
            if node.parent is not None:
                stack.append(node.parent)
            stack.extend(node.interfaces)
    return out


def subtype_of(graph: ClassGraph, a: str, b: str) -> bool:
    """True iff b is reachable from a via extends/implements edges (or a == b)."""
    if b not in graph.nodes:
        raise KeyError(b)
    return b in supertypes(graph, a)


def method_closure(graph: ClassGraph, name: str) -> list[ResolvedMethod]:
    """Declared plus inherited methods, overrides collapsed, inherited first."""
    node = graph.nodes.get(name)
    if node is None:
        raise KeyError(name)
    return list(node.closure)
