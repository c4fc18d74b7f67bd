"""
Solvkit CLI — main entry point.

Usage:
  solvkit nf -r 2 -d 2 "[z1,z2]*[z2,z1]"
  solvkit nf -r 2 -d 3 --eq "[[z1,z2],[z1*z2,z2*z1]]" "1"
  solvkit fox -r 2 -d 2 "z1*z2*z1^-1"
  solvkit omega "1 - a1"
  solvkit snf matrix.txt
  solvkit primitive 2,3
  solvkit retract -r 2 "z1*[z1,z2]"
  solvkit analyze -r 2 -d 2 --search subgroup.txt
  solvkit search -L 3 equations.txt subgroup.txt
  solvkit scan lemma7 -B 3
  solvkit scan eq19 -B 3 -r 3
  solvkit dextract -r 3 elements.txt
"""

import logging
import sys

import click

from solvkit import __version__
from solvkit.commands.closure import analyze_cmd, conjugator_cmd, retract_cmd, search_cmd
from solvkit.commands.elements import fox_cmd, nf_cmd, valuation_cmd
from solvkit.commands.lattice import primitive_cmd, snf_cmd
from solvkit.commands.scan import scan_group
from solvkit.core.config import settings


@click.group()
@click.version_option(version=__version__, prog_name="solvkit")
@click.option("--verbose", "-v", is_flag=True, help="Log engine decisions to stderr.")
def cli(verbose: bool):
    """Solvkit — exact computation in free solvable groups."""
    logging.basicConfig(
        level="DEBUG" if verbose else settings.log_level,
        format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
        stream=sys.stderr,
        force=True,
    )


# Register sub-commands
for command in (nf_cmd, fox_cmd, valuation_cmd, snf_cmd, primitive_cmd,
                retract_cmd, analyze_cmd, search_cmd, conjugator_cmd, scan_group):
    cli.add_command(command)
cli.add_command(valuation_cmd, name="valuation")
cli.add_command(conjugator_cmd, name="conjugator")


if __name__ == "__main__":
    cli()
