"""Shared record of acceptance outcomes, printed in the terminal summary."""

from contextlib import contextmanager

RESULTS: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    """Run a criterion body and record one PASS/FAIL line for it."""
    detail: dict = {}
    try:
        yield detail
    except BaseException as exc:
        line = f"criterion {number:>2} FAIL  {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        RESULTS.append(line)
        print("\n" + line)
        raise
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"criterion {number:>2} PASS  {title}" + (f" ({extra})" if extra else "")
    RESULTS.append(line)
    print("\n" + line)
