import sys

from shortness_lab.cli.lab import main

sys.exit(main())
