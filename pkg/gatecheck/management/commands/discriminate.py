from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = (
        "Compare the best global guessing probability with the local protocol "
        "for a gate against its noisy counterpart"
    )
    command_name = "discriminate"
