import sys

from .cli import run_command

sys.exit(run_command(sys.argv[1:]))
