import sys

from sumo_cq.cli import main

if __name__ == "__main__":
    sys.exit(main())
