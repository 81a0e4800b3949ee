# exit codes shared by every command
EXIT_SUCCESS = 0
EXIT_VERIFICATION_MISMATCH = 1
EXIT_INVALID_INPUT = 2
EXIT_IO_ERROR = 3

# csv headers
TRACE_CSV_HEADER = ["time_hours", "power_watts"]
SWEEP_CSV_HEADER = ["t_hours", "upper", "indiv", "coord"]

# relative slack when comparing a duration against a closed-form maximum
FEASIBILITY_RTOL = 1e-12

# slack when cross-checking a serialized schedule against a recomputed one;
# printed records carry 6 significant digits
SCHEDULE_ATOL = 1e-6
SCHEDULE_RTOL = 1e-5

# relative gap under which a forced OFF and a natural toggle share one instant
EVENT_TIME_RTOL = 1e-12

# scenario amplitude keyword standing for "the largest amplitude the scheme can offer"
MAX_AMPLITUDE_KEY = "max"

# significant digits for human-readable numbers
SIGNIFICANT_DIGITS = 6
