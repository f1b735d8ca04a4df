import json
import random

import httpx
import pytest

import codesign
from codesign.agent import (
    Agent,
    HttpBackend,
    LmBackend,
    MockBackend,
    Session,
    default_network,
    load_network,
)
from codesign.agent.engine import _resolve_name
from codesign.agent.network import TOOLS, LeafSpec
from codesign.errors import (
    BackendUnavailableError,
    ConfigError,
    UnknownNodeRefError,
    UnresolvedReferenceError,
)
from codesign.knowledge import build_index
from codesign.model import ModelDocument, load_model


@pytest.fixture
def document(fixture_path):
    return ModelDocument.load(fixture_path)


@pytest.fixture
def agent(document):
    return Agent(document, MockBackend(), index=build_index(codesign.corpus_path()))


@pytest.fixture
def routing_fixture():
    return json.loads(codesign.data_path("routing_fixture.json").read_text())


class AdversarialBackend(LmBackend):
    """Returns arbitrary junk for every call."""

    JUNK = [
        "banana",
        "",
        "run rm -rf now",
        "safety_analysis sounds right to me",
        "FORMAT_DISK",
        "42",
        "yes",
        "critical_path_or_something",
        "<script>alert(1)</script>",
    ]

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def choose(self, context, options, few_shot):
        return self.rng.choice(self.JUNK)

    def extract(self, context, schema):
        return self.rng.choice(self.JUNK)

    def phrase(self, facts, instructions):
        return self.rng.choice(self.JUNK)


class NameDroppingBackend(MockBackend):
    """Classifies fine but phrases without any component names."""

    def phrase(self, facts, instructions):
        return "Everything looks fine."


class OfflineBackend(MockBackend):
    def phrase(self, facts, instructions):
        raise BackendUnavailableError("backend offline")


class TestClassify:
    @pytest.mark.parametrize(
        "prompt,expected",
        [
            ("What are the single points of failure?", "safety_analysis"),
            ("How would you make my system safer?", "fault_tolerance"),
            ("What's the capital of France?", "other"),
            ("What does redundancy mean?", "safety_qa"),
        ],
    )
    def test_root_concepts(self, agent, prompt, expected):
        concept, step = agent.classify(prompt, agent.network)
        assert concept == expected
        assert step.choice == expected
        assert step.attempts == 1

    def test_choice_always_on_menu_even_for_junk(self, document):
        agent = Agent(document, AdversarialBackend(1))
        leaf, path, steps = agent.cascade("whatever text")
        assert leaf.tool == "Fallback"
        options = {o.concept_id for o in agent.network.options}
        for step in steps:
            assert step.choice is None or step.choice in options

    def test_accidental_exact_label_is_accepted(self, document):
        class OneShotBackend(AdversarialBackend):
            def choose(self, context, options, few_shot):
                return "other"

        agent = Agent(document, OneShotBackend())
        concept, step = agent.classify("gibberish", agent.network)
        assert concept == "other"


class TestFormulateTask:
    def test_propagate_args_from_table_prompt(self, agent):
        session = Session("s")
        leaf, path, _ = agent.cascade("What happens if Radar1, Radar2 and IMU have a fault?")
        task = agent.formulate_task(
            "What happens if Radar1, Radar2 and IMU have a fault?", path, leaf, session
        )
        assert task.tool == "PropagateFaults"
        assert task.args["seeds"] == ["Radar1", "Radar2", "IMU"]

    def test_last_fault_resolves_from_memory(self, agent):
        session = Session("s")
        agent.handle("What happens if Radar1, Radar2 and IMU have a fault?", session)
        leaf = LeafSpec("CriticalPath")
        task = agent.formulate_task(
            "Explain the critical path, given the last fault.",
            ("safety_analysis", "critical_path"),
            leaf,
            session,
        )
        assert task.args["exclude_last_fault"] is True
        assert task.args["exclude"] == ["IMU", "Radar1", "Radar2", "SignalProcessor"]

    def test_last_fault_with_empty_memory(self, agent):
        session = Session("s")
        with pytest.raises(UnresolvedReferenceError):
            agent.formulate_task(
                "Explain the critical path, given the last fault.",
                ("safety_analysis", "critical_path"),
                LeafSpec("CriticalPath"),
                session,
            )

    def test_propagate_without_names(self, agent):
        with pytest.raises(UnresolvedReferenceError):
            agent.formulate_task(
                "What happens if everything breaks?",
                ("safety_analysis", "fault_propagation"),
                LeafSpec("PropagateFaults"),
                Session("s"),
            )

    def test_name_resolution_rules(self, fixture_model):
        known = fixture_model.node_names()
        assert _resolve_name("gps", known) == "GPS"
        assert _resolve_name("SENSORFUSION", known) == "SensorFusion"
        assert _resolve_name("velocity", known) == "VelocitySensor"
        assert _resolve_name("camera", known) is None  # ambiguous prefix
        assert _resolve_name("zeppelin", known) is None
        assert _resolve_name("gp", known) is None  # prefix shorter than 3

    def test_unknown_extracted_name(self, document):
        class GhostBackend(MockBackend):
            def extract(self, context, schema):
                return "Ghost"

        agent = Agent(document, GhostBackend())
        with pytest.raises(UnknownNodeRefError):
            agent.formulate_task(
                "What happens if Ghost breaks?",
                ("safety_analysis", "fault_propagation"),
                LeafSpec("PropagateFaults"),
                Session("s"),
            )


class TestDispatch:
    def test_find_spofs_result(self, agent):
        session = Session("s")
        reply = agent.handle("What are the single points of failure?", session)
        assert reply.result["spofs"] == [
            "CollisionAvoidance",
            "GPS",
            "Map",
            "PathPlanner",
            "SensorFusion",
            "VehicleController",
        ]

    def test_replicate_bumps_revision_and_persists(self, agent, fixture_path):
        session = Session("s")
        reply = agent.handle("Replicate SensorFusion.", session)
        assert reply.result["revision"] == 1
        assert agent.document.model.revision == 1
        on_disk = load_model(fixture_path)
        assert {"SensorFusion_1", "SensorFusion_2"} <= set(on_disk.node_names())

    def test_fallback_has_no_tool_result(self, agent):
        reply = agent.handle("Tell me a joke.", Session("s"))
        assert reply.tool == "Fallback"
        assert reply.result["status"] == "unsupported"
        assert reply.revision == 0

    def test_propagate_updates_memory(self, agent):
        session = Session("s")
        agent.handle("What happens if Radar1, Radar2 and IMU have a fault?", session)
        assert session.memory.last_fault is not None
        assert session.memory.last_fault.faulty == {
            "IMU",
            "Radar1",
            "Radar2",
            "SignalProcessor",
        }
        assert session.memory.last_result["faulty"] == [
            "IMU",
            "Radar1",
            "Radar2",
            "SignalProcessor",
        ]

    def test_mutation_clears_memory_of_removed_nodes(self, agent):
        session = Session("s")
        agent.handle("What happens if SensorFusion breaks?", session)
        assert session.memory.last_fault is not None
        agent.handle("Replicate SensorFusion.", session)
        assert session.memory.last_fault is None

    def test_mutation_keeps_memory_of_unrelated_nodes(self, agent):
        session = Session("s")
        agent.handle("What happens if Radar1 breaks?", session)
        agent.handle("Replicate SensorFusion.", session)
        assert session.memory.last_fault is not None

    def test_knowledge_lookup(self, agent):
        reply = agent.handle("What does redundancy mean?", Session("s"))
        assert reply.tool == "AnswerSafetyQuestion"
        assert reply.result["chunks"]
        titles = [c["title"] for c in reply.result["chunks"]]
        assert any("redundancy" in t.lower() or "replication" in t.lower() for t in titles)


class TestRespond:
    def test_prose_contains_all_spof_names(self, agent):
        reply = agent.handle("What are the single points of failure?", Session("s"))
        for name in reply.result["spofs"]:
            assert name in reply.text

    def test_empty_propagation_template(self, agent):
        reply = agent.handle("What happens if Camera1 breaks?", Session("s"))
        assert "No faults propagate beyond the seeded set." in reply.text
        assert "Camera1" in reply.text

    def test_name_dropping_phrase_falls_back_to_template(self, document):
        agent = Agent(document, NameDroppingBackend())
        reply = agent.handle("What are the single points of failure?", Session("s"))
        assert reply.text != "Everything looks fine."
        for name in reply.result["spofs"]:
            assert name in reply.text

    def test_backend_unavailable_falls_back_to_template(self, document):
        agent = Agent(document, OfflineBackend())
        reply = agent.handle(
            "What happens if Radar1, Radar2 and IMU have a fault?", Session("s")
        )
        for name in ("IMU", "Radar1", "Radar2", "SignalProcessor"):
            assert name in reply.text

    def test_structured_result_attached_to_history(self, agent):
        session = Session("s")
        agent.handle("What are the single points of failure?", session)
        turn = session.history[-1]
        assert turn.role == "assistant"
        assert turn.result is not None and "spofs" in turn.result
        assert turn.trace


class TestHandle:
    def test_table_row_one_end_to_end(self, agent):
        reply = agent.handle(
            "What happens if Radar1, Radar2 and IMU have a fault?", Session("s")
        )
        assert reply.result["faulty"] == ["IMU", "Radar1", "Radar2", "SignalProcessor"]

    def test_deterministic_under_mock(self, document, fixture_path):
        prompt = "What are the single points of failure?"
        replies = []
        for _ in range(2):
            agent = Agent(ModelDocument.load(fixture_path), MockBackend())
            replies.append(agent.handle(prompt, Session("s")))
        assert replies[0].result == replies[1].result
        assert replies[0].trace == replies[1].trace
        assert replies[0].text == replies[1].text

    def test_replicate_then_spof_reflects_mutation(self, agent):
        session = Session("s")
        agent.handle("Replicate Lidar1, please.", session)
        names = set(agent.document.model.node_names())
        assert {"Lidar1_1", "Lidar1_2"} <= names and "Lidar1" not in names
        reply = agent.handle("What are the single points of failure?", session)
        assert reply.result["spofs"] == [
            "CollisionAvoidance",
            "GPS",
            "Map",
            "PathPlanner",
            "SensorFusion",
            "VehicleController",
        ]
        assert reply.revision == 1

    def test_errors_become_structured_results(self, agent):
        reply = agent.handle(
            "Explain the critical path, given the last fault.", Session("s")
        )
        assert reply.result["error"]["type"] == "UnresolvedReferenceError"
        assert reply.result["error"]["tool"] == "CriticalPath"
        assert "could not be completed" in reply.text

    def test_trace_records_every_micro_decision(self, agent):
        reply = agent.handle("What are the single points of failure?", Session("s"))
        nodes = [t["node"] for t in reply.trace]
        assert nodes == ["root", "analysis_kind", "task_formulation"]
        assert reply.trace[0]["choice"] == "safety_analysis"
        assert reply.trace[1]["choice"] == "spof"
        assert reply.trace[2]["args"] == {}


class TestRoutingFixture:
    def test_all_prompts_reach_their_leaf(self, fixture_path, routing_fixture):
        for entry in routing_fixture["prompts"]:
            document = ModelDocument.load(fixture_path)
            agent = Agent(document, MockBackend())
            session = Session("routing")
            if entry.get("needs_memory"):
                agent.handle(
                    "What happens if Radar1, Radar2 and IMU have a fault?", session
                )
            leaf, path, _ = agent.cascade(entry["prompt"])
            assert leaf.tool == entry["leaf"], entry["prompt"]
            assert list(path) == entry["path"], entry["prompt"]
            if entry["leaf"] != "Fallback":
                task = agent.formulate_task(entry["prompt"], path, leaf, session)
                for key, expected in entry.get("args", {}).items():
                    assert task.args.get(key) == expected, (entry["prompt"], key)

    def test_fixture_covers_every_leaf_ten_times(self, routing_fixture):
        counts: dict[str, int] = {}
        for entry in routing_fixture["prompts"]:
            counts[entry["leaf"]] = counts.get(entry["leaf"], 0) + 1
        for tool in TOOLS:
            assert counts.get(tool, 0) >= 10

    def test_fixture_contains_all_five_table_prompts(self, routing_fixture):
        prompts = {e["prompt"] for e in routing_fixture["prompts"]}
        assert {
            "What happens if Radar1, Radar2 and IMU have a fault?",
            "Show me the critical path.",
            "Explain the critical path, given the last fault.",
            "What are the single points of failure?",
            "How would you make my system safer?",
        } <= prompts


class TestOffMenuContainment:
    def test_adversarial_backend_never_escapes_leaves(self, fixture_path):
        document = ModelDocument.load(fixture_path)
        leaves = default_network().leaves()
        for seed in range(40):
            agent = Agent(document, AdversarialBackend(seed))
            reply = agent.handle(f"prompt number {seed}", Session(f"s{seed}"))
            assert reply.tool is None or reply.tool in leaves


class TestNetworkConfig:
    def test_default_network_shape(self):
        network = default_network()
        assert network.node_id == "root"
        assert [o.concept_id for o in network.options] == [
            "safety_qa",
            "safety_analysis",
            "fault_tolerance",
            "other",
        ]
        assert network.leaves() == set(TOOLS)

    def test_option_bounds_enforced(self):
        xml = (
            "<decision-network><decision id='root' question='q'>"
            "<option concept='only' description='d'><trigger>t</trigger>"
            "<leaf tool='Fallback'/></option>"
            "</decision></decision-network>"
        )
        with pytest.raises(ConfigError):
            load_network(xml)

    def test_unknown_tool_rejected(self):
        xml = (
            "<decision-network><decision id='root' question='q'>"
            "<option concept='a' description='d'><trigger>t</trigger>"
            "<leaf tool='LaunchMissiles'/></option>"
            "<option concept='b' description='d'><trigger>t</trigger>"
            "<leaf tool='Fallback'/></option>"
            "</decision></decision-network>"
        )
        with pytest.raises(ConfigError):
            load_network(xml)

    def test_trigger_required(self):
        xml = (
            "<decision-network><decision id='root' question='q'>"
            "<option concept='a' description='d'><leaf tool='Fallback'/></option>"
            "<option concept='b' description='d'><trigger>t</trigger>"
            "<leaf tool='Fallback'/></option>"
            "</decision></decision-network>"
        )
        with pytest.raises(ConfigError):
            load_network(xml)


class TestHttpBackend:
    def _transport(self, reply_content, captured):
        def handler(request: httpx.Request) -> httpx.Response:
            captured.append(request)
            return httpx.Response(
                200, json={"choices": [{"message": {"content": reply_content}}]}
            )

        return httpx.MockTransport(handler)

    def test_choose_wire_format(self):
        captured: list[httpx.Request] = []
        backend = HttpBackend(
            model="gpt-3.5-turbo",
            base_url="http://llm.test",
            api_key="test-key",
            transport=self._transport("safety_analysis", captured),
        )
        opts = [
            type("O", (), {"label": "safety_analysis", "text": "analyses"}),
            type("O", (), {"label": "other", "text": "anything else"}),
        ]
        label = backend.choose("What are the SPOFs?", opts, [("example", "safety_analysis")])
        assert label == "safety_analysis"
        request = captured[0]
        assert request.url.path == "/v1/chat/completions"
        assert request.headers["authorization"] == "Bearer test-key"
        body = json.loads(request.content)
        assert body["model"] == "gpt-3.5-turbo"
        assert body["temperature"] == 0
        roles = [m["role"] for m in body["messages"]]
        assert roles[0] == "system"
        assert roles[-1] == "user"
        assert body["messages"][-1]["content"] == "What are the SPOFs?"

    def test_env_configuration(self, monkeypatch):
        captured: list[httpx.Request] = []
        monkeypatch.setenv("CODESIGN_LLM_API_KEY", "env-key")
        monkeypatch.setenv("CODESIGN_LLM_BASE_URL", "http://env.test")
        backend = HttpBackend(transport=self._transport("ok", captured))
        backend.extract("Known components: A\nPrompt: A broke", "a list")
        assert captured[0].headers["authorization"] == "Bearer env-key"
        assert captured[0].url.host == "env.test"

    def test_http_error_maps_to_backend_unavailable(self):
        def handler(request):
            return httpx.Response(500, text="boom")

        backend = HttpBackend(
            base_url="http://llm.test",
            api_key="k",
            transport=httpx.MockTransport(handler),
        )
        with pytest.raises(BackendUnavailableError):
            backend.extract("x", "y")

    def test_connect_error_maps_to_backend_unavailable(self):
        def handler(request):
            raise httpx.ConnectError("no route")

        backend = HttpBackend(
            base_url="http://llm.test",
            api_key="k",
            transport=httpx.MockTransport(handler),
        )
        with pytest.raises(BackendUnavailableError):
            backend.choose("x", [], [])
