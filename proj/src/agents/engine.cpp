#include "motionagent/agents/engine.hpp"

#include "motionagent/agents/planner.hpp"
#include "motionagent/agents/verifier.hpp"
#include "motionagent/motioncore/generator.hpp"

namespace motionagent::agents {

namespace {

void emit(const TurnObserver& observer, const std::string& event, const json& data) {
    if (observer) observer(event, data);
}

motioncore::AnswerPayload answer_from(const RoundRecord& round, const UserQuery& query, const Engine& engine) {
    const TaskOutcome* gen = nullptr;
    for (const auto& o : round.outcomes) {
        if (o.capability == "generate_answer" && o.status == TaskStatus::Completed) gen = &o;
    }
    if (gen) {
        if (gen->output.data.is_object() && gen->output.data.contains("text")) return gen->output.data.get<motioncore::AnswerPayload>();
        return {gen->output.payload, {gen->task_id}};
    }
    motioncore::GenerationContext ctx;
    ctx.query = query;
    for (const auto& o : round.outcomes) ctx.entries.push_back({o.task_id, o.tool_id, o.output.payload});
    if (!engine.generator) {
        if (ctx.entries.empty()) throw Error(ErrorCode::EmptyContext, "no results to answer from");
        return {ctx.entries.back().payload, {ctx.entries.back().task_id}};
    }
    return motioncore::generate_answer(ctx, engine.generator, engine.prompts);
}

} // namespace

TurnOutcome run_session_turn(const UserQuery& query, const Engine& engine, const TurnObserver& observer) {
    query.validate();
    if (engine.round_budget < 1) throw Error(ErrorCode::InvalidArgument, "round budget must be at least 1");

    TurnOutcome out;
    out.trace.turn_id = query.session_id + "/" + std::to_string(query.turn_index);
    auto fail = [&](const Error& e) {
        out.trace.final_status = TurnStatus::Failed;
        out.trace.failure = TaskError{std::string(to_string(e.code())), e.message()};
        out.failure = e;
        emit(observer, "failure",
             {{"code", to_string(e.code())}, {"message", e.message()}, {"rounds", out.trace.rounds.size()}});
        return out;
    };

    const motioncore::ToolCatalog catalog = engine.registry->snapshot();
    std::optional<MetaTaskPlan> current;
    std::optional<Verdict> last_reject;

    for (int round = 1; round <= engine.round_budget; ++round) {
        try {
            current = round == 1 ? plan(query, catalog, engine.planner, engine.prompts)
                                 : replan(*current, *last_reject, query, catalog, engine.planner, engine.prompts);
        } catch (const Error& e) {
            return fail(e);
        }
        emit(observer, "plan_ready", {{"round", round}, {"plan", *current}});

        RoundRecord record;
        record.round = round;
        record.plan = *current;
        try {
            Verdict plan_verdict = verify_plan(*current, query, catalog, engine.verifier, engine.prompts);
            record.verdicts.push_back(plan_verdict);
            emit(observer, "verdict", {{"round", round}, {"verdict", plan_verdict}});
            if (!plan_verdict.approved()) {
                last_reject = plan_verdict;
                out.trace.rounds.push_back(std::move(record));
                continue;
            }

            RoundRecord executed = execute_plan(*current, catalog, query, {engine.selector, engine.prompts, observer, round});
            record.selections = std::move(executed.selections);
            record.outcomes = std::move(executed.outcomes);
            record.verdicts.insert(record.verdicts.end(), executed.verdicts.begin(), executed.verdicts.end());

            Verdict results_verdict = verify_results(record, query, engine.verifier, engine.prompts);
            record.verdicts.push_back(results_verdict);
            emit(observer, "verdict", {{"round", round}, {"verdict", results_verdict}});
            if (!results_verdict.approved()) {
                last_reject = results_verdict;
                out.trace.rounds.push_back(std::move(record));
                continue;
            }

            auto answer = answer_from(record, query, engine);
            out.trace.rounds.push_back(std::move(record));
            out.trace.final_status = TurnStatus::Answered;
            out.trace.answer = answer;
            out.answer = answer;
            emit(observer, "answer", {{"answer", answer}, {"rounds", out.trace.rounds.size()}});
            return out;
        } catch (const Error& e) {
            out.trace.rounds.push_back(std::move(record));
            return fail(e);
        }
    }
    return fail(Error(ErrorCode::RoundBudgetExhausted,
                      "no approved result after " + std::to_string(engine.round_budget) + " rounds",
                      {{"last_verdict", last_reject ? json(*last_reject) : json(nullptr)}}));
}

} // namespace motionagent::agents
