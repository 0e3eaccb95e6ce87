import sys

from fin_inverse.cli.main import main


if __name__ == "__main__":
    sys.exit(main())
