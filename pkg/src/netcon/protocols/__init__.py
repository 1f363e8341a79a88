"""Ready-made protocol definitions."""

from . import tables

BUILTINS = {
    "global-line": tables.global_line,
    "square": tables.square,
    "square2": tables.square2,
    "square2-corrected": lambda: tables.square2(corrected=True),
    "line-replication": tables.line_replication,
    "no-leader-line-replication": tables.no_leader_line_replication,
    "no-leader-line-replication-corrected": lambda: tables.no_leader_line_replication(corrected=True),
}


def builtin_rule_table(name: str):
    """Rule table for a builtin protocol name."""
    if name == "squaring-local":
        from .replication import squaring_local_table
        return squaring_local_table()
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin protocol {name!r}") from None
