from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = "Estimate the depolarizing fraction p from the non-accept frequency (p = 4/3 f1)"
    command_name = "estimate_noise"
    default_q = 1.0
