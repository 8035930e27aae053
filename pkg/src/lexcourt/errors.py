"""Exception types shared across the package."""


class ValidationError(Exception):
    """Bad user input: malformed corpus, qrels, run files, or arguments.

    CLI commands map this to exit code 2; unexpected exceptions exit 1.
    """


class IndexFormatError(Exception):
    """Index file is corrupt, truncated, or has an unsupported version."""
