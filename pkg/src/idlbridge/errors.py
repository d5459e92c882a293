"""Bridge-level error type shared by the object worlds and the bridge runtime."""

from __future__ import annotations


class BridgeError(Exception):
    """An error that may travel across the nominal/structural boundary.

    The payload is an ordinary value and is never rewritten while the error
    propagates; each boundary the error crosses appends one entry to ``trace``.
    """

    def __init__(self, code: str, payload=None, origin: str = "bridge"):
        super().__init__(code)
        self.code = code
        self.payload = payload
        self.origin = origin
        self.trace: list[str] = []

    def __str__(self) -> str:
        base = f"[{self.origin}] {self.code}"
        if self.payload is not None:
            base += f": {self.payload}"
        return base


# Error codes raised by the worlds.
DUPLICATE_CLASS = "duplicate-class"
UNKNOWN_PARENT = "unknown-parent"
UNKNOWN_CLASS = "unknown-class"
UNKNOWN_CTOR = "unknown-ctor"
UNKNOWN_OBJECT = "unknown-object"
UNKNOWN_FIELD = "unknown-field"
NO_SUCH_METHOD = "no-such-method"
NO_SUCH_SLOT = "no-such-slot"
ARITY_MISMATCH = "arity-mismatch"
NOT_AN_ANCESTOR = "not-an-ancestor"
WRONG_WORLD = "wrong-world"

# Error codes raised by the bridge runtime.
VERIFY_NOT_RUN = "verify-not-run"
UNKNOWN_ALIAS = "unknown-alias"
UNKNOWN_TYPE = "unknown-type"
COERCION_FAILURE = "coercion-failure"
NO_PEER = "no-peer"
ALIAS_COLLISION = "alias-collision"
NOT_A_CALLBACK_CLASS = "not-a-callback-class"
