from slotlime.verification.suites import (
    SUITES,
    VerificationReport,
    run_suite,
    verify_conjecture,
    verify_insensitivity,
    verify_productform,
    verify_propositions,
)
