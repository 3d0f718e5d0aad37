# =============================================================================
# RL Curriculum Scheduler - Command Line Entry
# =============================================================================
''' Runs the command line: `python -m src.curriculum_scheduler_py ...`. '''
# =============================================================================

import sys

from .cli import main

sys.exit(main())


# =============================================================================
# End of File
# =============================================================================
