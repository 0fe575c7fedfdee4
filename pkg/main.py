import sys

from stereopipe.cli import main


# Script entrypoint for `python main.py run --left ... --right ... --out ...`
if __name__ == "__main__":
    sys.exit(main())
