"""Allow ``python -m omsim``."""
from .cli import main

if __name__ == "__main__":
    main()
