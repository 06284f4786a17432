import sys

from lenient_cer.cli import main

sys.exit(main())
