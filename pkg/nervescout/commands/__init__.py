from argparse import _SubParsersAction

from . import enriched, gk, hammock, quasi, segal, sset


def register_commands(subparsers: _SubParsersAction) -> None:
    """Attach every subcommand group to the top-level parser."""

    # Order fixes the listing in --help.
    sset.register(subparsers)
    quasi.register(subparsers)
    enriched.register(subparsers)
    gk.register(subparsers)
    hammock.register(subparsers)
    segal.register(subparsers)
