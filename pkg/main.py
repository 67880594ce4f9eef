"""scatterlab - spatial sign and Tyler shape estimators, efficiencies and simulations."""
import sys

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
