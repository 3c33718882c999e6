# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import sys

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
