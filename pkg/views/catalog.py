# views/catalog.py
import click

from models import DomainSpec
from utils.domains import direct_invariants, enumerate_kinds, make_domain
from utils.errors import CartanHartogsError
from utils.report import DOMAIN, run_report


def _identity_checks(report, spec: DomainSpec):
    """Both invariant identities against the direct per-family values."""
    genus, dim = direct_invariants(spec.kind)
    prefix = f"catalog.{spec.kind}"
    report.check(f"{prefix}.genus", 2 + spec.a * (spec.r - 1) + spec.b, genus, 0.0)
    report.check(f"{prefix}.dim", spec.r + spec.a * spec.r * (spec.r - 1) // 2 + spec.r * spec.b, dim, 0.0)


@click.command("catalog")
@click.argument("kind", type=DOMAIN, required=False)
@click.option("--max-dim", type=click.IntRange(min=1), default=None,
              help="List every constructible kind with dim <= N.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.option("--tol", multiple=True, metavar="NAME=VALUE")
def catalog(kind, max_dim, out, tol):
    """Invariants (r, a, b, γ, d) of one domain kind, or of all kinds up to --max-dim."""
    if kind is None and max_dim is None:
        raise click.UsageError("give a KIND or --max-dim")

    def body(report):
        specs = [kind] if kind is not None else []
        if max_dim is not None:
            for k in enumerate_kinds(max_dim):
                try:
                    specs.append(make_domain(k))
                except CartanHartogsError as e:
                    report.check(f"catalog.{k}.construct", 1, 0, 0.0)
                    report.add_data(f"error.{k}", str(e))
        for spec in specs:
            _identity_checks(report, spec)
        report.add_data("domains", [s.to_dict() for s in specs])

    run_report("catalog", {"kind": str(kind.kind) if kind else None, "max_dim": max_dim}, body, tol=tol, out=out)
