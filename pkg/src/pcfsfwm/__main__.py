import sys

from pcfsfwm.cli import main

sys.exit(main())
