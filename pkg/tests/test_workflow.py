import random

import networkx as nx
import pytest

from modoc.corpus import Granularity
from modoc.errors import (
    FunctionAlreadyBound,
    KindMismatch,
    MissingRequiredInput,
    NoFunctionBound,
    SlotOccupied,
    SlotUnknown,
    SourceKindRejected,
    UnknownModule,
    WouldCreateCycle,
)
from modoc.generation import GenerationGateway
from modoc.index import build_index
from modoc.manuscript import ManuscriptStore, Provenance, insert_span
from modoc.query import parse_structured
from modoc.workflow import (
    FunctionKind,
    ModuleKind,
    PresetName,
    Services,
    WorkflowGraph,
    WriteScope,
    preset,
)


@pytest.fixture
def services(mini_corpus, tmp_path):
    return Services(
        corpus=mini_corpus,
        index=build_index(mini_corpus),
        gateway=GenerationGateway(doc_lookup=mini_corpus.get),
        manuscripts=ManuscriptStore(tmp_path),
    )


def graph_with(*kinds):
    graph = WorkflowGraph()
    ids = [graph.add_module(kind) for kind in kinds]
    return graph, ids


class TestModuleHosting:
    def test_bind_align_to_read(self):
        graph, (read,) = graph_with(ModuleKind.READ)
        graph.bind_function(read, FunctionKind.ALIGN)
        assert graph.get_module(read).function is FunctionKind.ALIGN

    def test_bind_discover_to_write_rejected(self):
        graph, (write,) = graph_with(ModuleKind.WRITE)
        with pytest.raises(KindMismatch):
            graph.bind_function(write, FunctionKind.DISCOVER)

    def test_second_bind_rejected(self):
        graph, (read,) = graph_with(ModuleKind.READ)
        graph.bind_function(read, FunctionKind.ALIGN)
        with pytest.raises(FunctionAlreadyBound):
            graph.bind_function(read, FunctionKind.HIGHLIGHTS)

    def test_unknown_module(self):
        graph = WorkflowGraph()
        with pytest.raises(UnknownModule):
            graph.bind_function("ghost", FunctionKind.ALIGN)

    def test_remove_module_removes_links(self):
        graph, (keywords, discovery) = graph_with(ModuleKind.KEYWORDS, ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(keywords, discovery, "query")
        graph.remove_module(keywords)
        assert graph.links == []


class TestAddLink:
    def test_recall_and_cite_wiring_accepted(self):
        graph, (keywords, discovery, write) = graph_with(
            ModuleKind.KEYWORDS, ModuleKind.DISCOVERY, ModuleKind.WRITE
        )
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(keywords, discovery, "query")
        graph.add_link(write, discovery, "context")
        assert len(graph.links) == 2

    def test_two_cycle_rejected(self):
        graph, (generation, discovery, keywords) = graph_with(
            ModuleKind.GENERATION, ModuleKind.DISCOVERY, ModuleKind.KEYWORDS
        )
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.bind_function(generation, FunctionKind.GENERATE_CITATION)
        graph.add_link(generation, discovery, "context")
        with pytest.raises(WouldCreateCycle):
            graph.add_link(discovery, generation, "target_results")
        # rejection left the graph unchanged
        assert len(graph.links) == 1

    def test_slot_occupied(self):
        graph, (k1, k2, discovery) = graph_with(
            ModuleKind.KEYWORDS, ModuleKind.KEYWORDS, ModuleKind.DISCOVERY
        )
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(k1, discovery, "query")
        with pytest.raises(SlotOccupied):
            graph.add_link(k2, discovery, "query")

    def test_slot_unknown(self):
        graph, (keywords, discovery) = graph_with(ModuleKind.KEYWORDS, ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        with pytest.raises(SlotUnknown):
            graph.add_link(keywords, discovery, "premise")

    def test_unbound_target_declares_no_slots(self):
        graph, (keywords, discovery) = graph_with(ModuleKind.KEYWORDS, ModuleKind.DISCOVERY)
        with pytest.raises(SlotUnknown):
            graph.add_link(keywords, discovery, "query")

    def test_source_kind_rejected(self):
        graph, (discovery1, discovery2) = graph_with(ModuleKind.DISCOVERY, ModuleKind.DISCOVERY)
        graph.bind_function(discovery2, FunctionKind.DISCOVER)
        with pytest.raises(SourceKindRejected):
            graph.add_link(discovery1, discovery2, "context")

    def test_random_links_never_create_cycles(self):
        rng = random.Random(4)
        graph = WorkflowGraph()
        module_ids = []
        slot_pool = []
        for _ in range(30):
            kind = rng.choice(list(ModuleKind))
            module_ids.append(graph.add_module(kind))
        for mid in module_ids:
            node = graph.get_module(mid)
            functions = sorted(
                f for f in FunctionKind if f in __import__("modoc.workflow", fromlist=["HOSTABLE_FUNCTIONS"]).HOSTABLE_FUNCTIONS[node.kind]
            )
            if functions and rng.random() < 0.9:
                graph.bind_function(mid, rng.choice(functions))

        from modoc.workflow import SLOT_SPECS

        accepted = 0
        for _ in range(3000):
            frm, to = rng.choice(module_ids), rng.choice(module_ids)
            target = graph.get_module(to)
            slots = sorted(SLOT_SPECS[target.function]) if target.function else ["query"]
            slot = rng.choice(slots) if slots else "query"
            try:
                graph.add_link(frm, to, slot)
                accepted += 1
            except (WouldCreateCycle, SlotOccupied, SlotUnknown, SourceKindRejected):
                pass
            oracle = nx.DiGraph()
            oracle.add_nodes_from(module_ids)
            oracle.add_edges_from((l.from_module, l.to_module) for l in graph.links)
            assert nx.is_directed_acyclic_graph(oracle)
        assert accepted > 0


class TestFire:
    def _recall_and_cite(self, services):
        graph = preset(PresetName.RECALL_AND_CITE)
        write = graph.get_module("write-1")
        keywords = graph.get_module("keywords-1")
        write.state.selection = "Zebra finch song learning follows motifs."
        keywords.state.query = parse_structured("learning")
        return graph

    def test_recall_and_cite_fire_fills_discovery(self, services):
        graph = self._recall_and_cite(services)
        entry = graph.fire("discovery-1", services)
        results = graph.get_module("discovery-1").state.results
        assert results
        assert results[0].doc_id == "d2"
        assert entry.status == "ok"
        assert set(entry.input_digests) == {"query", "context"}

    def test_fire_unbound_module(self, services):
        graph, (write,) = graph_with(ModuleKind.WRITE)
        with pytest.raises(NoFunctionBound):
            graph.fire(write, services)

    def test_fire_mutates_only_host_module(self, services):
        graph = self._recall_and_cite(services)
        before = graph.deep_state()
        graph.fire("discovery-1", services)
        after = graph.deep_state()
        changed = [mid for mid in before if before[mid] != after[mid]]
        assert changed == ["discovery-1"]

    def test_missing_required_input_names_slot(self, services):
        graph, (write, read) = graph_with(ModuleKind.WRITE, ModuleKind.READ)
        graph.bind_function(read, FunctionKind.ALIGN)
        graph.add_link(write, read, "alignment_source")
        graph.get_module(read).state.doc_id = "d1"
        with pytest.raises(MissingRequiredInput) as excinfo:
            graph.fire(read, services)
        assert excinfo.value.details["slot"] == "alignment_source"

    def test_cite_and_check_alignment(self, services):
        graph = preset(PresetName.CITE_AND_CHECK)
        graph.get_module("write-1").state.selection = "Tutors shape the outcome."
        graph.get_module("read-1").state.doc_id = "d1"
        graph.get_module("read-1").state.granularity = Granularity.SENTENCE
        before = graph.deep_state()
        graph.fire("read-1", services)
        hits = graph.get_module("read-1").state.hits
        assert hits[0].text == "Tutors shape the outcome."
        assert hits[0].score == pytest.approx(1.0, abs=1e-6)
        after = graph.deep_state()
        changed = [mid for mid in before if before[mid] != after[mid]]
        assert changed == ["read-1"]

    def test_refire_with_same_inputs_reproduces_digest(self, services):
        graph = self._recall_and_cite(services)
        first = graph.fire("discovery-1", services)
        second = graph.fire("discovery-1", services)
        assert first.output_digest == second.output_digest
        assert first.input_digests == second.input_digests

    def test_discover_without_any_input_missing(self, services):
        graph, (discovery,) = graph_with(ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        with pytest.raises(MissingRequiredInput):
            graph.fire(discovery, services)

    def test_write_scope_manuscript_provides_full_text(self, services):
        ms = services.manuscripts.new(title="Draft", manuscript_id="m1")
        insert_span(ms, 0, "Corvids solve puzzles with tools.", Provenance.user_typed())
        services.manuscripts.save(ms)

        graph, (write, discovery) = graph_with(ModuleKind.WRITE, ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(write, discovery, "context")
        graph.get_module(write).state.manuscript_id = "m1"
        graph.get_module(write).state.scope = WriteScope.MANUSCRIPT
        graph.fire(discovery, services)
        assert graph.get_module(discovery).state.results[0].doc_id == "d3"


class TestFireAll:
    def test_generate_and_check_chain_consumes_fresh_output(self, services):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        graph.get_module("write-1").state.selection = "Finches imitate tutors."
        graph.get_module("read-1").state.doc_id = "d1"
        trace = graph.fire_all(services)
        by_module = {e.module_id: e for e in trace}
        assert [e.module_id for e in trace] == ["generation-1", "discovery-1", "read-1"]
        generation_out = by_module["generation-1"].output_digest
        assert by_module["discovery-1"].input_digests["context"] == generation_out
        assert by_module["read-1"].input_digests["alignment_source"] == generation_out
        assert all(e.status == "ok" for e in trace)

    def test_two_independent_chains_deterministic_order(self, services):
        graph = WorkflowGraph()
        w1 = graph.add_module(ModuleKind.WRITE)
        d1 = graph.add_module(ModuleKind.DISCOVERY)
        w2 = graph.add_module(ModuleKind.WRITE)
        d2 = graph.add_module(ModuleKind.DISCOVERY)
        for write, discovery in ((w1, d1), (w2, d2)):
            graph.bind_function(discovery, FunctionKind.DISCOVER)
            graph.add_link(write, discovery, "context")
            graph.get_module(write).state.selection = "song learning"
        trace = graph.fire_all(services)
        assert [e.module_id for e in trace] == ["discovery-1", "discovery-2"]

        order = graph.topological_order()
        position = {mid: i for i, mid in enumerate(order)}
        for link in graph.links:
            assert position[link.from_module] < position[link.to_module]

    def test_empty_graph_empty_trace(self, services):
        assert WorkflowGraph().fire_all(services) == []

    def test_modules_with_empty_inputs_are_skipped(self, services):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        # no selection set anywhere: generation lacks its premise
        graph.get_module("read-1").state.doc_id = "d1"
        trace = graph.fire_all(services)
        statuses = {e.module_id: e.status for e in trace}
        assert statuses["generation-1"] == "skipped"
        assert statuses["discovery-1"] == "skipped"
        assert statuses["read-1"] == "skipped"

    def test_per_module_errors_recorded_not_fatal(self, services):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        graph.get_module("write-1").state.selection = "Finches imitate tutors."
        # read module lacks doc_id: align will fail after generation succeeds
        trace = graph.fire_all(services)
        statuses = {e.module_id: e.status for e in trace}
        assert statuses["generation-1"] == "ok"
        assert statuses["discovery-1"] == "ok"
        assert statuses["read-1"] == "error"

    def test_trace_is_topological_over_bound_modules(self, services):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        graph.get_module("write-1").state.selection = "Song circuits."
        graph.get_module("read-1").state.doc_id = "d1"
        trace = graph.fire_all(services)
        position = {e.module_id: i for i, e in enumerate(trace)}
        for link in graph.links:
            if link.from_module in position and link.to_module in position:
                assert position[link.from_module] < position[link.to_module]


class TestPresets:
    @pytest.mark.parametrize("name", list(PresetName))
    def test_presets_construct_and_are_acyclic(self, name):
        graph = preset(name)
        assert graph.topological_order()  # raises on cycles
        oracle = nx.DiGraph()
        oracle.add_nodes_from(graph.modules)
        oracle.add_edges_from((l.from_module, l.to_module) for l in graph.links)
        assert nx.is_directed_acyclic_graph(oracle)

    def test_recall_and_cite_links(self):
        graph = preset(PresetName.RECALL_AND_CITE)
        links = {(l.from_module, l.to_module, l.input_slot) for l in graph.links}
        assert links == {
            ("keywords-1", "discovery-1", "query"),
            ("write-1", "discovery-1", "context"),
        }

    def test_generate_and_check_contains_generation_to_discovery(self):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        assert any(
            l.from_module == "generation-1" and l.to_module == "discovery-1"
            for l in graph.links
        )

    @pytest.mark.parametrize("name", list(PresetName))
    def test_presets_execute_end_to_end_with_stub(self, name, services):
        graph = preset(name)
        graph.get_module("write-1").state.selection = "Zebra finch song learning."
        graph.get_module("keywords-1").state.query = parse_structured("learning")
        for mid, node in graph.modules.items():
            if node.kind is ModuleKind.READ:
                node.state.doc_id = "d2"
        trace = graph.fire_all(services)
        bound = [m for m in graph.modules.values() if m.function]
        assert len(trace) == len(bound)
        assert all(e.status == "ok" for e in trace)


class TestClearHistory:
    def test_clear_after_turns(self, services):
        graph, (generation,) = graph_with(ModuleKind.GENERATION)
        graph.bind_function(generation, FunctionKind.ASSISTANT)
        node = graph.get_module(generation)
        audit_before = len(services.gateway.audit)
        for prompt in ("one", "two", "three"):
            node.state.prompt = prompt
            graph.fire(generation, services)
        assert len(node.state.history) == 6
        graph.clear_history(generation)
        assert node.state.history == []
        # audit log unaffected
        assert len(services.gateway.audit) == audit_before + 3

    def test_clear_on_empty_is_noop(self, services):
        graph, (generation,) = graph_with(ModuleKind.GENERATION)
        graph.clear_history(generation)
        assert graph.get_module(generation).state.history == []

    def test_clear_on_non_generation_module(self, services):
        graph, (write,) = graph_with(ModuleKind.WRITE)
        with pytest.raises(KindMismatch):
            graph.clear_history(write)


class TestSerialization:
    def test_graph_round_trip(self, services):
        graph = preset(PresetName.GENERATE_AND_CHECK)
        graph.get_module("write-1").state.selection = "text"
        graph.get_module("keywords-1").state.query = parse_structured("finch")
        graph.get_module("read-1").state.doc_id = "d1"
        graph.fire_all(services)
        restored = WorkflowGraph.from_dict(graph.to_dict())
        assert restored.to_dict() == graph.to_dict()

    def test_assistant_history_round_trips(self, services):
        graph, (generation,) = graph_with(ModuleKind.GENERATION)
        graph.bind_function(generation, FunctionKind.ASSISTANT)
        node = graph.get_module(generation)
        node.state.prompt = "hello"
        graph.fire(generation, services)
        restored = WorkflowGraph.from_dict(graph.to_dict())
        assert restored.to_dict() == graph.to_dict()
