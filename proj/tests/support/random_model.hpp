#pragma once

// Generator of random, syntactically well-formed models for roundtrip tests.

#include <random>
#include <string>

#include "stf/model/ast.hpp"

namespace stf::testing {

class RandomModelGen {
public:
    explicit RandomModelGen(std::uint64_t seed) : rng_(seed) {}

    Model model() {
        Model m;
        for (int i = 0, n = pick(0, 2); i < n; ++i) m.imports.push_back({name("lib") + ".stf", {}});
        for (int i = 0, n = pick(1, 3); i < n; ++i) m.things.push_back(thing());
        for (int i = 0, n = pick(0, 2); i < n; ++i) m.configurations.push_back(configuration());
        return m;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    std::string name(const std::string& prefix) { return prefix + std::to_string(pick(0, 40)); }
    Ref ref(const std::string& prefix) { return Ref{name(prefix), {}}; }

    ScalarType type() { return static_cast<ScalarType>(pick(0, 4)); }

    Value literal() {
        switch (pick(0, 3)) {
            case 0: return Value::integer(pick(-1000, 1000));
            case 1: return Value::real(std::uniform_real_distribution<double>(-1e3, 1e3)(rng_));
            case 2: return Value::boolean(coin());
            default: {
                static const char* samples[] = {"", "hi", "a \"quoted\" word", "tab\tnew\nline", "back\\slash"};
                return Value::string(samples[pick(0, 4)]);
            }
        }
    }

    Expr expr(int depth) {
        Expr e;
        const int choice = depth <= 0 ? pick(0, 1) : pick(0, 5);
        switch (choice) {
            case 0: e.node = LiteralExpr{literal()}; break;
            case 1: e.node = NameExpr{name("v")}; break;
            case 2:
            case 3:
                e.node = BinaryExpr{static_cast<BinaryOp>(pick(0, 12)), expr(depth - 1), expr(depth - 1)};
                break;
            case 4: e.node = UnaryExpr{coin() ? UnaryOp::Neg : UnaryOp::Not, expr(depth - 1)}; break;
            default: e.node = DaActionExpr{static_cast<DaAction>(pick(0, 3))}; break;
        }
        return e;
    }

    Statement statement(int depth) {
        Statement s;
        const int choice = depth <= 0 ? pick(0, 3) : pick(0, 6);
        switch (choice) {
            case 0: s.node = AssignStmt{ref("v"), expr(2)}; break;
            case 1: s.node = LocalDeclStmt{ref("v"), type(), expr(2)}; break;
            case 2: {
                SendStmt send{ref("p"), ref("m"), {}};
                for (int i = 0, n = pick(0, 3); i < n; ++i) send.args.push_back(expr(2));
                s.node = std::move(send);
                break;
            }
            case 3:
                if (coin()) {
                    s.node = PrintStmt{expr(2)};
                } else {
                    s.node = DaStmt{static_cast<DaAction>(pick(0, 3))};
                }
                break;
            case 4:
            case 5: {
                IfStmt st;
                st.cond = expr(2);
                *st.then_body = block(depth - 1);
                if (coin()) *st.else_body = block(depth - 1);
                s.node = std::move(st);
                break;
            }
            default: {
                WhileStmt st;
                st.cond = expr(2);
                *st.body = block(depth - 1);
                s.node = std::move(st);
                break;
            }
        }
        return s;
    }

    Block block(int depth) {
        Block b;
        for (int i = 0, n = pick(0, 3); i < n; ++i) b.push_back(statement(depth));
        return b;
    }

    std::vector<Annotation> annotations() {
        static const char* keys[] = {"platform", "backend", "dataset_format"};
        std::vector<Annotation> out;
        for (int i = 0, n = pick(0, 2); i < n; ++i) out.push_back({keys[pick(0, 2)], name("val"), {}});
        return out;
    }

    DataAnalyticsSpec da() {
        DataAnalyticsSpec d;
        d.dataset = name("data") + ".csv";
        for (int i = 0, n = pick(1, 3); i < n; ++i) d.features.push_back(ref("f"));
        for (int i = 0, n = pick(1, 2); i < n; ++i) d.labels.push_back(ref("l"));
        d.sequential = coin();
        if (coin()) d.window = Window{pick(1, 48), pick(1, 24)};
        d.scaling = static_cast<Scaling>(pick(0, 2));
        d.missing = coin() ? MissingPolicy::Drop : MissingPolicy::MeanImpute;
        if (coin()) {
            ExpertMode e{ref("algo"), {}};
            for (int i = 0, n = pick(0, 2); i < n; ++i) e.hyperparams.push_back({name("h"), literal(), {}});
            d.mode = e;
        } else {
            AutoMlMode a{ref("metric"), pick(2, 10), std::nullopt};
            if (coin()) a.budget = pick(1, 30);
            d.mode = a;
        }
        if (coin()) d.pretrained = name("model") + ".json";
        d.annotations = annotations();
        return d;
    }

    Thing thing() {
        Thing t;
        t.name = name("T");
        t.is_fragment = coin(0.2);
        for (int i = 0, n = pick(0, 2); i < n; ++i) t.includes.push_back(ref("F"));
        t.annotations = annotations();
        for (int i = 0, n = pick(0, 3); i < n; ++i) {
            Property p{name("prop"), type(), std::nullopt, {}};
            if (coin()) p.initial = literal();
            t.properties.push_back(p);
        }
        for (int i = 0, n = pick(0, 3); i < n; ++i) {
            Message m{name("m"), {}, {}};
            for (int k = 0, np = pick(0, 3); k < np; ++k) m.params.push_back({name("a"), type(), {}});
            t.messages.push_back(m);
        }
        for (int i = 0, n = pick(0, 2); i < n; ++i) {
            Port p{name("p"), {}, {}, {}};
            for (int k = 0, nr = pick(0, 2); k < nr; ++k) p.receives.push_back(ref("m"));
            for (int k = 0, ns = pick(0, 2); k < ns; ++k) p.sends.push_back(ref("m"));
            t.ports.push_back(p);
        }
        if (coin()) t.da = da();
        t.behavior.name = name("SM");
        t.behavior.initial = ref("S");
        for (int i = 0, n = pick(0, 3); i < n; ++i) {
            State s;
            s.name = name("S");
            s.on_entry = block(2);
            s.on_exit = block(1);
            for (int k = 0, nt = pick(0, 3); k < nt; ++k) {
                Transition tr;
                tr.target = ref("S");
                if (coin()) tr.event = EventRef{ref("p"), ref("m")};
                if (coin()) tr.guard = expr(3);
                tr.actions = block(2);
                s.transitions.push_back(std::move(tr));
            }
            t.behavior.states.push_back(std::move(s));
        }
        return t;
    }

    Configuration configuration() {
        Configuration c;
        c.name = name("C");
        for (int i = 0, n = pick(0, 3); i < n; ++i) c.instances.push_back({ref("i"), ref("T")});
        for (int i = 0, n = pick(0, 2); i < n; ++i) {
            c.connectors.push_back({{ref("i"), ref("p")}, {ref("i"), ref("p")}, {}});
        }
        return c;
    }

    std::mt19937_64 rng_;
};

}  // namespace stf::testing
