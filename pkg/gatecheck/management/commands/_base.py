from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from gatecheck.optimization import OptimizerConfig
from gatecheck.reports import write_report
from gatecheck.runner import RunConfig, run


class GatecheckCommand(BaseCommand):
    """Shared flags and report handling; subclasses set ``command_name``."""

    command_name = None
    needs_gate = True
    default_q = 0.5

    def add_arguments(self, parser):
        parser.add_argument(
            "--gate",
            type=str,
            required=self.needs_gate,
            help="Gate name (cnot, swap, ...) or path to a JSON/YAML gate file",
        )
        parser.add_argument("--p", type=float, help="Noise fraction of the counterpart channel")
        parser.add_argument(
            "--q",
            type=float,
            default=self.default_q,
            help=f"Prior probability of the noisy channel (default: {self.default_q})",
        )
        parser.add_argument("--shots", type=int, default=100_000, help="Number of simulated shots")
        parser.add_argument(
            "--seed",
            type=int,
            help="Random seed (default: GATECHECK_SEED, else a fresh seed is drawn and logged)",
        )
        parser.add_argument("--format", choices=["json", "csv"], default="json")
        parser.add_argument("--out", type=str, help="Write the report here instead of stdout")
        parser.add_argument("--tol", type=float, help="Override the numerical tolerance")
        parser.add_argument(
            "--shards",
            type=int,
            help="Worker threads for shot simulation (default: GATECHECK_SHARDS)",
        )

    def build_config(self, options):
        seed = options.get("seed")
        if seed is None:
            seed = settings.GATECHECK_SEED
        return RunConfig(
            command=self.command_name,
            gate=options.get("gate"),
            p=options.get("p"),
            q=options["q"],
            shots=options["shots"],
            seed=seed,
            output=options.get("out"),
            format=options["format"],
            tol=options.get("tol"),
            shards=options.get("shards") or settings.GATECHECK_SHARDS,
            block_shots=settings.GATECHECK_BLOCK_SHOTS,
            optimizer=OptimizerConfig(
                restarts=settings.GATECHECK_OPTIMIZER_RESTARTS,
                max_iters=settings.GATECHECK_OPTIMIZER_MAXITER,
                tol=settings.GATECHECK_OPTIMIZER_TOL,
            ),
        )

    def handle(self, *args, **options):
        config = self.build_config(options)
        outcome = run(config)
        if outcome.exit_code != 0:
            raise CommandError(outcome.error, returncode=outcome.exit_code)

        text = outcome.render(config.format)
        if config.output:
            path = write_report(text, config.output)
            self.stdout.write(self.style.SUCCESS(f"Wrote {self.command_name} report to {path}"))
        else:
            self.stdout.write(text, ending="")
