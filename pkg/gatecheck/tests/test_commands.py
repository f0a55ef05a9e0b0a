import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from gatecheck.exceptions import ProductStateError
from gatecheck.runner import RunConfig, run


def call(name, **options):
    out = StringIO()
    call_command(name, stdout=out, **options)
    return out.getvalue()


def call_json(name, **options):
    return json.loads(call(name, **options))


class DecomposeCommandTests(SimpleTestCase):
    def test_cnot(self):
        report = call_json("decompose", gate="cnot")
        self.assertEqual(report["command"], "decompose")
        self.assertEqual(len(report["lambdas"]), 4)
        self.assertLess(report["reconstruction_error"], 1e-9)

    def test_non_unitary_gate_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            rows = [[[2, 0] if i == j else [0, 0] for j in range(4)] for i in range(4)]
            path.write_text(json.dumps({"gate": {"matrix": rows}}), encoding="utf-8")
            with self.assertRaisesMessage(CommandError, "not unitary") as ctx:
                call("decompose", gate=str(path))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_fixture_description_is_reported(self):
        self.assertIn("Controlled-NOT", call_json("decompose", gate="cnot")["description"])

    def test_directory_as_gate(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaisesMessage(CommandError, "is a directory") as ctx:
                call("decompose", gate=tmp)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_unknown_gate(self):
        with self.assertRaises(CommandError) as ctx:
            call("decompose", gate="no-such-gate")
        self.assertEqual(ctx.exception.returncode, 2)


class FindStateCommandTests(SimpleTestCase):
    def test_swap_certificate(self):
        report = call_json("find_state", gate="swap")
        self.assertLess(report["input_schmidt2"], 1e-8)
        self.assertLess(report["output_schmidt2"], 1e-8)
        self.assertEqual(set(report["input"]), {"alice", "bob"})

    def test_construction_failure_exits_3(self):
        failure = ProductStateError("product-state certificate failed", residuals=(1e-3, 1e-3))
        with mock.patch("gatecheck.runner.find_product_preserving_state", side_effect=failure):
            with self.assertRaises(CommandError) as ctx:
                call("find_state", gate="cnot")
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn("residuals=", str(ctx.exception))


class DiscriminateCommandTests(SimpleTestCase):
    def test_cnot(self):
        report = call_json("discriminate", gate="cnot", p=0.5, q=0.5, shots=100_000, seed=5)
        self.assertEqual(report["p_global"], 0.6875)
        self.assertAlmostEqual(report["p_locc_analytic"], 0.6875, delta=1e-12)
        self.assertEqual(report["seed"], 5)
        self.assertEqual(report["strategy"], "measure")
        for key in ("p_locc_simulated", "ci95", "shots", "p_hat"):
            self.assertIn(key, report)

    def test_deterministic_output(self):
        options = dict(gate="swap", p=0.3, q=0.4, shots=5000, seed=11)
        self.assertEqual(call("discriminate", **options), call("discriminate", **options))

    def test_missing_p(self):
        with self.assertRaisesMessage(CommandError, "--p") as ctx:
            call("discriminate", gate="cnot")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_csv_is_only_for_simulate(self):
        with self.assertRaises(CommandError) as ctx:
            call("discriminate", gate="cnot", p=0.5, format="csv")
        self.assertEqual(ctx.exception.returncode, 2)

    @override_settings(GATECHECK_OPTIMIZER_RESTARTS=3)
    def test_mixed_unitary_document(self):
        document = {
            "gate": "cnot",
            "noise": {
                "type": "mixed_unitary",
                "branches": [{"gate": "cnot", "probability": 0.5}, {"gate": "cz", "probability": 0.5}],
            },
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "noisy.json"
            path.write_text(json.dumps(document), encoding="utf-8")
            report = call_json("discriminate", gate=str(path), q=0.5, seed=1)
        self.assertGreaterEqual(report["p_global"], report["p_locc_analytic"] - 1e-9)

    def test_non_numeric_branch_probability(self):
        document = {
            "gate": "cnot",
            "noise": {"type": "mixed_unitary", "branches": [{"gate": "cz", "probability": "half"}]},
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "noisy.json"
            path.write_text(json.dumps(document), encoding="utf-8")
            outcome = run(RunConfig(command="discriminate", gate=str(path), seed=1))
        self.assertEqual(outcome.exit_code, 2)
        self.assertIn("probability", outcome.error)


class SimulateCommandTests(SimpleTestCase):
    def test_json_summary(self):
        report = call_json("simulate", gate="cnot", p=0.5, q=0.5, shots=20_000, seed=3)
        self.assertEqual(sum(report["counts"]["unitary"]) + sum(report["counts"]["noisy"]), 20_000)
        self.assertAlmostEqual(report["analytic_guess"], 0.6875, delta=1e-12)

    def test_csv_table(self):
        lines = call("simulate", gate="cnot", p=0.5, q=0.5, shots=1000, seed=3, format="csv").splitlines()
        self.assertEqual(lines[0], "truth,outcome_a,outcome_b,count")
        self.assertEqual(len(lines), 9)
        self.assertEqual(sum(int(line.rsplit(",", 1)[1]) for line in lines[1:]), 1000)

    def test_shard_count_does_not_change_the_report(self):
        options = dict(gate="swap", p=0.7, q=0.5, shots=30_000, seed=8)
        self.assertEqual(call("simulate", shards=1, **options), call("simulate", shards=3, **options))

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "reports" / "sim.json"
            message = call("simulate", gate="cnot", p=0.2, shots=1000, seed=1, out=str(target))
            self.assertIn("Wrote simulate report", message)
            self.assertEqual(json.loads(target.read_text(encoding="utf-8"))["shots"], 1000)

    @override_settings(GATECHECK_SEED=424242)
    def test_seed_falls_back_to_settings(self):
        report = call_json("simulate", gate="cnot", p=0.2, shots=1000)
        self.assertEqual(report["seed"], 424242)

    def test_invalid_shots(self):
        with self.assertRaises(CommandError) as ctx:
            call("simulate", gate="cnot", p=0.2, shots=0)
        self.assertEqual(ctx.exception.returncode, 2)


class EstimateNoiseCommandTests(SimpleTestCase):
    def test_recovers_p(self):
        report = call_json("estimate_noise", gate="cnot", p=0.6, shots=1_000_000, seed=7)
        self.assertEqual(report["q"], 1.0)
        self.assertAlmostEqual(report["p_hat"], 0.6, delta=0.01)
        self.assertLessEqual(report["ci95"][0], report["p_hat"])


@override_settings(GATECHECK_OPTIMIZER_RESTARTS=4)
class CounterexampleCommandTests(SimpleTestCase):
    def test_report(self):
        report = call_json("counterexample", p=0.5, seed=0)
        self.assertEqual(report["published_value"], 0.6875)
        self.assertAlmostEqual(report["p_guess_phi_plus"], 0.75, delta=1e-12)
        self.assertGreaterEqual(report["p_guess_optimizer"], report["p_guess_phi_plus"] - 1e-8)
        self.assertLessEqual(report["locc_upper_bound_product_inputs"], report["p_guess_optimizer"] + 1e-9)


class RunnerTests(SimpleTestCase):
    def test_unknown_command(self):
        outcome = run(RunConfig(command="plot"))
        self.assertEqual(outcome.exit_code, 2)
        self.assertIn("unknown command", outcome.error)

    def test_success_renders_sorted_json(self):
        outcome = run(RunConfig(command="decompose", gate="swap"))
        self.assertEqual(outcome.exit_code, 0)
        keys = list(json.loads(outcome.render()))
        self.assertEqual(keys, sorted(keys))

    def test_random_seed_is_reported(self):
        outcome = run(RunConfig(command="simulate", gate="cnot", p=0.1, shots=100))
        self.assertEqual(outcome.exit_code, 0)
        self.assertIsInstance(outcome.report["seed"], int)

    def test_drawn_seed_is_logged(self):
        with self.assertLogs("gatecheck.runner", level="WARNING") as logs:
            outcome = run(RunConfig(command="simulate", gate="cnot", p=0.1, shots=100))
        self.assertIn(f"drew seed {outcome.report['seed']}", logs.output[0])
