"""
Command-line launcher.

    python run.py --n 3 --p 5 basis
    python run.py --n 2 --p 5 --K 3 --M 10 verify all
"""

import os

from app import cli
from config import Config

if __name__ == '__main__':
    # rule tables are cached between runs
    os.makedirs(Config.RULE_CACHE, exist_ok=True)
    cli(prog_name='iwahori')
