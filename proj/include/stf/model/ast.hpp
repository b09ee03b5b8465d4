#pragma once

// Abstract syntax of the modeling language: things with ports, messages,
// properties, a statechart, an optional DA/ML block, and configurations.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stf/model/value.hpp"

namespace stf {

/// Location of a node in its source file.
///
/// Spans never participate in structural equality: operator== on any AST
/// node compares content only, so a re-parsed model equals the original.
struct SourceSpan {
    std::string file;
    std::uint32_t line = 0;
    std::uint32_t column = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

/// Heap-allocated value with deep copy and deep comparison.
template <typename T>
class Box {
public:
    Box() : ptr_(std::make_unique<T>()) {}
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT: implicit by intent
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

/// A name used to refer to another declaration.
struct Ref {
    std::string name;
    SourceSpan span;
    friend bool operator==(const Ref&, const Ref&) = default;
};

enum class DaAction { Save, Preprocess, Train, Predict };
std::string_view to_string(DaAction a);

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
std::string_view to_string(BinaryOp op);

struct Expr;

struct LiteralExpr {
    Value value;
    friend bool operator==(const LiteralExpr&, const LiteralExpr&) = default;
};
/// Reference to a local, a message parameter or a property (resolved in that order).
struct NameExpr {
    std::string name;
    friend bool operator==(const NameExpr&, const NameExpr&) = default;
};
struct UnaryExpr {
    UnaryOp op;
    Box<Expr> operand;
    friend bool operator==(const UnaryExpr&, const UnaryExpr&) = default;
};
struct BinaryExpr {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    friend bool operator==(const BinaryExpr&, const BinaryExpr&) = default;
};
/// A DA action written where an expression is expected (e.g. a guard).
/// Parsed so the validator can reject it with a precise span.
struct DaActionExpr {
    DaAction action;
    friend bool operator==(const DaActionExpr&, const DaActionExpr&) = default;
};

struct Expr {
    std::variant<LiteralExpr, NameExpr, UnaryExpr, BinaryExpr, DaActionExpr> node;
    SourceSpan span;
    friend bool operator==(const Expr&, const Expr&) = default;
};

struct Statement;
using Block = std::vector<Statement>;

struct AssignStmt {
    Ref target;
    Expr value;
    friend bool operator==(const AssignStmt&, const AssignStmt&) = default;
};
struct LocalDeclStmt {
    Ref name;
    ScalarType type;
    Expr init;
    friend bool operator==(const LocalDeclStmt&, const LocalDeclStmt&) = default;
};
struct SendStmt {
    Ref port;
    Ref message;
    std::vector<Expr> args;
    friend bool operator==(const SendStmt&, const SendStmt&) = default;
};
struct PrintStmt {
    Expr value;
    friend bool operator==(const PrintStmt&, const PrintStmt&) = default;
};
struct IfStmt {
    Expr cond;
    Box<Block> then_body;
    Box<Block> else_body;
    friend bool operator==(const IfStmt&, const IfStmt&) = default;
};
struct WhileStmt {
    Expr cond;
    Box<Block> body;
    friend bool operator==(const WhileStmt&, const WhileStmt&) = default;
};
struct DaStmt {
    DaAction action;
    friend bool operator==(const DaStmt&, const DaStmt&) = default;
};

struct Statement {
    std::variant<AssignStmt, LocalDeclStmt, SendStmt, PrintStmt, IfStmt, WhileStmt, DaStmt> node;
    SourceSpan span;
    friend bool operator==(const Statement&, const Statement&) = default;
};

struct Annotation {
    std::string key;
    std::string value;
    SourceSpan span;
    friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Property {
    std::string name;
    ScalarType type;
    std::optional<Value> initial;
    SourceSpan span;
    friend bool operator==(const Property&, const Property&) = default;
};

struct Param {
    std::string name;
    ScalarType type;
    SourceSpan span;
    friend bool operator==(const Param&, const Param&) = default;
};

struct Message {
    std::string name;
    std::vector<Param> params;
    SourceSpan span;
    friend bool operator==(const Message&, const Message&) = default;
};

struct Port {
    std::string name;
    std::vector<Ref> receives;
    std::vector<Ref> sends;
    SourceSpan span;
    friend bool operator==(const Port&, const Port&) = default;
};

struct EventRef {
    Ref port;
    Ref message;
    friend bool operator==(const EventRef&, const EventRef&) = default;
};

struct Transition {
    Ref target;
    std::optional<EventRef> event;
    std::optional<Expr> guard;
    Block actions;
    SourceSpan span;
    friend bool operator==(const Transition&, const Transition&) = default;
};

struct State {
    std::string name;
    Block on_entry;
    Block on_exit;
    std::vector<Transition> transitions;
    SourceSpan span;
    friend bool operator==(const State&, const State&) = default;
};

struct StateMachine {
    std::string name;
    Ref initial;
    std::vector<State> states;
    SourceSpan span;
    friend bool operator==(const StateMachine&, const StateMachine&) = default;
};

enum class Scaling { None, MinMax, ZScore };
enum class MissingPolicy { Drop, MeanImpute };
std::string_view to_string(Scaling s);
std::string_view to_string(MissingPolicy m);

struct Hyperparam {
    std::string name;
    Value value;
    SourceSpan span;
    friend bool operator==(const Hyperparam&, const Hyperparam&) = default;
};

struct ExpertMode {
    Ref algorithm;
    std::vector<Hyperparam> hyperparams;
    friend bool operator==(const ExpertMode&, const ExpertMode&) = default;
};

struct AutoMlMode {
    Ref metric;
    std::int64_t folds = 5;
    std::optional<std::int64_t> budget;
    friend bool operator==(const AutoMlMode&, const AutoMlMode&) = default;
};

struct Window {
    std::int64_t lag = 1;
    std::int64_t horizon = 1;
    friend bool operator==(const Window&, const Window&) = default;
};

struct DataAnalyticsSpec {
    std::string dataset;
    std::vector<Ref> features;
    std::vector<Ref> labels;
    bool sequential = false;
    std::optional<Window> window;
    Scaling scaling = Scaling::None;
    MissingPolicy missing = MissingPolicy::Drop;
    std::variant<ExpertMode, AutoMlMode> mode;
    std::optional<std::string> pretrained;
    std::vector<Annotation> annotations;
    SourceSpan span;
    SourceSpan window_span;
    friend bool operator==(const DataAnalyticsSpec&, const DataAnalyticsSpec&) = default;
};

struct Thing {
    std::string name;
    bool is_fragment = false;
    std::vector<Ref> includes;
    std::vector<Annotation> annotations;
    std::vector<Property> properties;
    std::vector<Message> messages;
    std::vector<Port> ports;
    std::optional<DataAnalyticsSpec> da;
    StateMachine behavior;
    SourceSpan span;
    friend bool operator==(const Thing&, const Thing&) = default;

    const Property* find_property(std::string_view n) const;
    const Message* find_message(std::string_view n) const;
    const Port* find_port(std::string_view n) const;
    const State* find_state(std::string_view n) const;
};

struct Instance {
    Ref name;
    Ref thing;
    friend bool operator==(const Instance&, const Instance&) = default;
};

struct Endpoint {
    Ref instance;
    Ref port;
    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Connector {
    Endpoint left;
    Endpoint right;
    SourceSpan span;
    friend bool operator==(const Connector&, const Connector&) = default;
};

struct Configuration {
    std::string name;
    std::vector<Instance> instances;
    std::vector<Connector> connectors;
    SourceSpan span;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct Import {
    std::string path;
    SourceSpan span;
    friend bool operator==(const Import&, const Import&) = default;
};

struct Model {
    std::vector<Import> imports;
    std::vector<Thing> things;
    std::vector<Configuration> configurations;
    friend bool operator==(const Model&, const Model&) = default;

    const Thing* find_thing(std::string_view n) const;
    const Configuration* find_configuration(std::string_view n) const;
};

/// Documented annotation keys.
bool is_registered_annotation(std::string_view key);

/// Backend of a DA-enabled thing: `@backend` inside the DA block, else on the thing.
std::optional<std::string> resolved_backend(const Thing& thing);

/// Static result type of a binary operator, or nullopt when ill-typed.
/// `+` concatenates when either side is a String; Int and Float mix to Float;
/// Timestamp +/- Int stays a Timestamp and Timestamp - Timestamp is an Int.
std::optional<ScalarType> binary_result_type(BinaryOp op, ScalarType lhs, ScalarType rhs);
std::optional<ScalarType> unary_result_type(UnaryOp op, ScalarType operand);

}  // namespace stf
