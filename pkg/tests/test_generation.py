import threading

import pytest

from modoc.errors import (
    DuplicateProviderId,
    InvalidRequest,
    ProviderUnreachable,
    UnsupportedKind,
)
from modoc.generation import (
    CITATION_MARKER,
    STUB_PROVIDER_ID,
    ChatTurn,
    CitationIntent,
    GenerationGateway,
    GenerationKind,
    GenerationRequest,
    Provider,
)


@pytest.fixture
def gateway(mini_corpus):
    return GenerationGateway(doc_lookup=mini_corpus.get)


class TestStubProvider:
    def test_citation_rule_application(self, gateway):
        req = GenerationRequest(
            kind=GenerationKind.CITATION,
            context="Our claim about song learning.",
            target_doc="d1",
            intent=CitationIntent.BACKGROUND,
        )
        result = gateway.generate(req)
        assert result.text == "[Background] #REFR Birds learn songs."
        assert result.markers == (13,)
        assert result.text[13:18] == CITATION_MARKER

    def test_citation_without_intent(self, gateway):
        req = GenerationRequest(kind=GenerationKind.CITATION, target_doc="d1")
        result = gateway.generate(req)
        assert result.text == "#REFR Birds learn songs."
        assert result.markers == (0,)

    def test_citation_always_contains_marker(self, gateway):
        for doc_id in ("d1", "d2", "d3"):
            req = GenerationRequest(kind=GenerationKind.CITATION, target_doc=doc_id)
            assert CITATION_MARKER in gateway.generate(req).text

    def test_conclusion_truncates_to_thirty_tokens(self, gateway):
        premise = " ".join(f"w{i}" for i in range(50))
        req = GenerationRequest(kind=GenerationKind.CONCLUSION, context=premise)
        result = gateway.generate(req)
        assert result.text == "Therefore, " + " ".join(f"w{i}" for i in range(30))

    def test_conclusion_requires_context(self, gateway):
        with pytest.raises(InvalidRequest) as excinfo:
            gateway.generate(GenerationRequest(kind=GenerationKind.CONCLUSION, context="  "))
        assert excinfo.value.details["field"] == "context"

    def test_citation_requires_target_doc(self, gateway):
        with pytest.raises(InvalidRequest) as excinfo:
            gateway.generate(GenerationRequest(kind=GenerationKind.CITATION, context="x"))
        assert excinfo.value.details["field"] == "target_doc"

    def test_assistant_echo(self, gateway):
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="How do finches learn?")
        assert gateway.generate(req).text == "STUB: How do finches learn?"

    def test_query_parse_delegates_to_rule_parser(self, gateway):
        req = GenerationRequest(
            kind=GenerationKind.QUERY_PARSE,
            context="papers by Richard Hahnloser from 2020 to 2024",
        )
        result = gateway.generate(req)
        assert result.text == 'Author.FullName:"Richard Hahnloser" Year:2020..2024'

    def test_identical_requests_identical_text_and_digest(self, gateway):
        req = GenerationRequest(
            kind=GenerationKind.CITATION,
            context="ctx",
            target_doc="d2",
            intent=CitationIntent.METHOD,
        )
        first = gateway.generate(req)
        second = gateway.generate(req)
        assert first.text == second.text
        assert first.request_digest == second.request_digest

    def test_digest_changes_with_request(self, gateway):
        a = GenerationRequest(kind=GenerationKind.ASSISTANT, context="one")
        b = GenerationRequest(kind=GenerationKind.ASSISTANT, context="two")
        assert a.digest() != b.digest()

    def test_history_participates_in_digest(self):
        a = GenerationRequest(kind=GenerationKind.ASSISTANT, context="q")
        b = GenerationRequest(
            kind=GenerationKind.ASSISTANT,
            context="q",
            history=(ChatTurn("user", "earlier"),),
        )
        assert a.digest() != b.digest()


class TestRegistry:
    def test_fresh_registry_has_exactly_the_stub(self, gateway):
        providers = gateway.list_providers()
        assert [p.provider_id for p in providers] == [STUB_PROVIDER_ID]

    def test_register_remote_provider(self, gateway):
        gateway.register_provider(
            Provider(
                provider_id="gpt",
                capabilities=frozenset({GenerationKind.ASSISTANT}),
                base_url="http://localhost:9/generate",
            )
        )
        assert [p.provider_id for p in gateway.list_providers()] == ["gpt", STUB_PROVIDER_ID]

    def test_duplicate_provider_id(self, gateway):
        provider = Provider(provider_id="x", capabilities=frozenset({GenerationKind.ASSISTANT}))
        gateway.register_provider(provider)
        with pytest.raises(DuplicateProviderId):
            gateway.register_provider(provider)

    def test_unknown_provider(self, gateway):
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="x", provider_id="ghost")
        with pytest.raises(ProviderUnreachable):
            gateway.generate(req)

    def test_unsupported_kind(self, gateway):
        gateway.register_provider(
            Provider(provider_id="narrow", capabilities=frozenset({GenerationKind.ASSISTANT}))
        )
        req = GenerationRequest(
            kind=GenerationKind.CONCLUSION, context="premise", provider_id="narrow"
        )
        with pytest.raises(UnsupportedKind):
            gateway.generate(req)


class TestRemoteProvider:
    def test_unreachable_endpoint_maps_to_provider_unreachable(self, gateway):
        gateway.register_provider(
            Provider(
                provider_id="dead",
                capabilities=frozenset(GenerationKind),
                base_url="http://127.0.0.1:1/generate",
                timeout_seconds=0.5,
            )
        )
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="x", provider_id="dead")
        with pytest.raises(ProviderUnreachable):
            gateway.generate(req)

    def test_failed_generation_is_not_audited(self, gateway):
        gateway.register_provider(
            Provider(
                provider_id="dead",
                capabilities=frozenset(GenerationKind),
                base_url="http://127.0.0.1:1/generate",
                timeout_seconds=0.5,
            )
        )
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="x", provider_id="dead")
        before = len(gateway.audit)
        with pytest.raises(ProviderUnreachable):
            gateway.generate(req)
        assert len(gateway.audit) == before


class TestAuditLog:
    def test_every_result_is_retained(self, gateway):
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="x")
        result = gateway.generate(req)
        assert result.request_digest in gateway.audit
        assert gateway.audit.get(result.request_digest)[0].text == result.text

    def test_duplicate_requests_append(self, gateway):
        req = GenerationRequest(kind=GenerationKind.ASSISTANT, context="again")
        gateway.generate(req)
        gateway.generate(req)
        assert len(gateway.audit.get(req.digest())) == 2

    def test_concurrent_generations_all_audited(self, gateway):
        errors = []

        def worker(i):
            try:
                gateway.generate(
                    GenerationRequest(kind=GenerationKind.ASSISTANT, context=f"c{i}")
                )
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert len(gateway.audit) == 16
