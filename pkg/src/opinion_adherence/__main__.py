import sys

from opinion_adherence.cli import main

sys.exit(main())
