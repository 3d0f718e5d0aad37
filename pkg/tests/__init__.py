# =============================================================================
# RL Curriculum Scheduler - Testing Module
# =============================================================================
'''
RL Curriculum Scheduler - Testing Module
-
Contains all of the objects that are used for testing the schedulers, the
students they train, the run loop and the command line.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# test the ability to read experiment specs from files
from .test_read import test_read

# test the run loop against straight-line reference loops
from .test_oracle import (
    test_dqn_matches_the_reference_loop,
    test_tscl_matches_the_reference_loop,
)


# =============================================================================
# End of File
# =============================================================================
