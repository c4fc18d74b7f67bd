"""Scan commands — exhaustive grid checks in the class-4 nilpotent quotient."""

import sys

import click

from solvkit.algebra.nilpotent import ScanReport, swap_coefficients_scan, swap_equation_scan
from solvkit.commands.common import EXIT_NEGATIVE, emit, guarded


@click.group("scan")
def scan_group():
    """Grid scans; exit 0 when CONFIRMED, 1 when VIOLATED."""


def _finish(report: ScanReport) -> None:
    emit(report.render())
    if not report.confirmed:
        sys.exit(EXIT_NEGATIVE)


@scan_group.command("lemma7")
@click.option("--bound", "-B", type=click.IntRange(min=1), required=True, help="Exponent bound B.")
@guarded
def swap_cmd(bound: int):
    """Solutions of [g1,g2,g2,g1] = [z1,z2,z2,z1] mod γ5 with g1 = z1^a z2^b, g2 = z1^c z2^d."""
    _finish(swap_equation_scan(bound))


@scan_group.command("eq19")
@click.option("--bound", "-B", type=click.IntRange(min=1), required=True, help="Exponent bound B.")
@click.option("--rank", "-r", type=click.IntRange(min=2), default=3, show_default=True)
@click.option("--index", "-i", "index", type=int, default=2, show_default=True, help="Index i of the swapped generator.")
@guarded
def coefficients_cmd(bound: int, rank: int, index: int):
    """Closed-form swap coefficients against exact basic-commutator coordinates on the full grid."""
    _finish(swap_coefficients_scan(bound, rank, index))


scan_group.add_command(swap_cmd, name="swap")
scan_group.add_command(coefficients_cmd, name="coefficients")
