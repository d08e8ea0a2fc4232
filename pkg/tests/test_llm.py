import pytest

from plainadapt.errors import RequestError, TransportError, ValidationError
from plainadapt.llm import (
    ChatClient,
    ChatMessage,
    CompletionRequest,
    CompletionResult,
    MockProvider,
    UsageLedger,
    complete,
    cost_estimate,
)


def request(model="m1"):
    return CompletionRequest(
        model_id=model, messages=(ChatMessage("user", "hello"),)
    )


class TestRequestValidation:
    def test_empty_messages_rejected(self):
        with pytest.raises(ValidationError):
            CompletionRequest(model_id="m", messages=())

    def test_empty_user_content_rejected(self):
        with pytest.raises(ValidationError):
            CompletionRequest(model_id="m", messages=(ChatMessage("user", ""),))

    def test_unknown_role_rejected(self):
        with pytest.raises(ValidationError):
            ChatMessage("tool", "x")


class TestComplete:
    def test_mock_passthrough(self):
        provider = MockProvider([{"text": "hello", "prompt_tokens": 3, "completion_tokens": 1}])
        result = complete(request(), provider)
        assert result.text == "hello"
        assert (result.prompt_tokens, result.completion_tokens) == (3, 1)

    def test_retries_then_succeeds(self):
        provider = MockProvider([429, 500, {"text": "ok"}])
        result = complete(request(), provider, retry_cap=3, sleep=lambda s: None)
        assert result.text == "ok"
        assert result.attempts == 3

    def test_exhausted_retries(self):
        provider = MockProvider([429, 429])
        with pytest.raises(TransportError) as exc_info:
            complete(request(), provider, retry_cap=1, sleep=lambda s: None)
        assert exc_info.value.attempts == 1
        assert provider.calls == 1

    def test_no_retry_on_plain_4xx(self):
        provider = MockProvider([400, {"text": "never reached"}])
        with pytest.raises(RequestError):
            complete(request(), provider, retry_cap=3, sleep=lambda s: None)
        assert provider.calls == 1

    def test_backoff_is_exponential(self):
        sleeps = []
        provider = MockProvider([429, 429, {"text": "ok"}])
        complete(request(), provider, retry_cap=3, backoff_base=0.5, sleep=sleeps.append)
        assert sleeps == [0.5, 1.0]

    def test_deterministic_with_same_script(self):
        script = [{"text": "a", "prompt_tokens": 2, "completion_tokens": 5}]
        r1 = complete(request(), MockProvider(list(script)))
        r2 = complete(request(), MockProvider(list(script)))
        assert r1 == r2


class TestLedger:
    def test_additive(self):
        ledger = UsageLedger()
        provider = MockProvider(
            [
                {"text": "a", "prompt_tokens": 10, "completion_tokens": 5},
                {"text": "b", "prompt_tokens": 7, "completion_tokens": 3},
            ]
        )
        complete(request(), provider, ledger=ledger)
        complete(request(), provider, ledger=ledger)
        assert ledger.totals() == {"m1": (17, 8)}

    def test_client_ledger_keyed_by_model(self):
        client = ChatClient(
            MockProvider(
                [
                    {"text": "a", "prompt_tokens": 1, "completion_tokens": 1},
                    {"text": "b", "prompt_tokens": 2, "completion_tokens": 2},
                ]
            )
        )
        client.complete(request("m1"))
        client.complete(request("m2"))
        assert client.ledger.total_tokens("m1") == 2
        assert client.ledger.total_tokens("m2") == 4


class TestCostEstimate:
    def test_one_million_tokens(self):
        ledger = UsageLedger()
        ledger.record("gpt-4o", 600_000, 400_000)
        assert cost_estimate(ledger, {"gpt-4o": 10.0}) == pytest.approx(10.0)

    def test_empty_ledger(self):
        assert cost_estimate(UsageLedger(), {}) == 0.0

    def test_two_million_cheap_model(self):
        ledger = UsageLedger()
        ledger.record("gpt-4o-mini", 1_500_000, 500_000)
        assert cost_estimate(ledger, {"gpt-4o-mini": 0.6}) == pytest.approx(1.20)

    def test_unknown_model_raises(self):
        ledger = UsageLedger()
        ledger.record("mystery", 1, 1)
        with pytest.raises(ValidationError):
            cost_estimate(ledger, {"gpt-4o": 10.0})
