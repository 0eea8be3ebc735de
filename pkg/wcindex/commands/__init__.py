import click

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY_FAILED = 3


def fail(message: str, code: int = EXIT_USAGE):
    click.echo(f"error: {message}", err=True)
    raise click.exceptions.Exit(code)


def parse_int_list(value: str, name: str) -> tuple[int, ...]:
    try:
        items = tuple(int(x) for x in value.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"{name} must be a comma-separated list of integers, got {value!r}")
    if not items:
        raise ValueError(f"{name} is empty")
    return items
