use super::*;
use crate::js::parse_js;

fn run(src: &str) -> FileAnalysis {
    analyze_file(&parse_js(src, "node.js"), &Catalog::builtin())
}

fn pairs(fa: &FileAnalysis) -> Vec<(u32, &str, u32, &str)> {
    fa.flows
        .iter()
        .map(|f| (f.source.line, f.source.entry_id.as_str(), f.sink.line, f.sink.entry_id.as_str()))
        .collect()
}

fn wrap(body: &str) -> String {
    format!(
        "module.exports = function(RED) {{\n  function N(config) {{\n    RED.nodes.createNode(this, config);\n    var node = this;\n{body}\n  }}\n  RED.nodes.registerType('n', N);\n}};\n"
    )
}

fn check_trace(f: &TaintFlow) {
    let first = f.steps.first().expect("non-empty trace");
    let last = f.steps.last().unwrap();
    assert_eq!((first.rule, first.line), (Rule::Source, f.source.line), "{f:#?}");
    assert_eq!((last.rule, last.line), (Rule::Sink, f.sink.line), "{f:#?}");
    assert!(f.steps.iter().all(|s| s.rule != Rule::Param), "{f:#?}");
    assert!(f.steps[1..f.steps.len() - 1].iter().all(|s| !matches!(s.rule, Rule::Source | Rule::Sink)));
}

#[test]
fn input_to_send() {
    let fa = run(&wrap("    node.on('input', function(msg) { node.send(msg); });"));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 5, "node-send")]);
    assert_eq!(fa.flows[0].data_class, DataClass::InputMessage);
    check_trace(&fa.flows[0]);
}

#[test]
fn concatenation_keeps_taint() {
    let fa = run(&wrap(
        "    node.on('input', function(msg) {\n      var beta = msg.payload + '!';\n      console.log(beta);\n    });",
    ));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 7, "console")]);
    let rules: Vec<Rule> = fa.flows[0].steps.iter().map(|s| s.rule).collect();
    assert_eq!(rules, vec![Rule::Source, Rule::Member, Rule::Operand, Rule::Assign, Rule::Sink]);
}

#[test]
fn constant_argument_is_not_a_flow() {
    let fa = run(&wrap("    node.send({payload: 42});"));
    assert!(fa.flows.is_empty());
    assert!(fa.endpoints.iter().any(|e| e.entry_id == "node-send"));
}

#[test]
fn credentials_to_log_through_local_helper() {
    let fa = run(&wrap(
        "    function fmt(x) { return 'pw=' + x; }\n    var line = fmt(node.credentials.password);\n    node.log(line);",
    ));
    assert_eq!(pairs(&fa), vec![(6, "credentials-read", 7, "node-log")]);
    assert_eq!(fa.flows[0].source.symbol, "node.credentials.password");
    check_trace(&fa.flows[0]);
}

#[test]
fn summaries_are_context_sensitive() {
    let fa = run(&wrap(
        "    function id(v) { return v; }\n    var a = id(process.env.HOME);\n    var b = id(1);\n    console.log(b);\n    node.send(a);",
    ));
    assert_eq!(pairs(&fa), vec![(6, "env-read", 9, "node-send")]);
}

#[test]
fn sink_inside_helper_resolves_per_call() {
    let fa = run(&wrap(
        "    function out(v) { console.log(v); }\n    out(7);\n    node.on('input', function(msg) { out(msg.topic); });",
    ));
    assert_eq!(pairs(&fa), vec![(7, "listener-input", 5, "console")]);
    check_trace(&fa.flows[0]);
}

#[test]
fn container_writes_taint_the_whole_object() {
    let fa = run(&wrap(
        "    node.on('input', function(msg) {\n      var o = {};\n      o.inner = msg.payload;\n      node.status(o);\n    });",
    ));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 8, "node-status")]);
}

#[test]
fn catch_and_error_callback_parameters() {
    let fa = run(&wrap(
        "    try { x(); } catch (e) { node.error(e); }\n    require('fs').readFile('f', function(err, data) { node.warn(err); });",
    ));
    let p = pairs(&fa);
    assert!(p.contains(&(5, "catch-parameter", 5, "node-error")), "{p:?}");
    assert!(p.contains(&(6, "error-callback-parameter", 6, "node-warn")), "{p:?}");
    assert!(fa.flows.iter().all(|f| f.data_class == DataClass::ErrorMessage));
}

#[test]
fn unknown_callee_passes_taint_through() {
    let fa = run(&wrap(
        "    node.on('input', function(msg) {\n      var s = JSON.stringify(msg);\n      require('fs').writeFileSync('/tmp/x', s);\n    });",
    ));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 7, "fs-write-file-sync")]);
}

#[test]
fn taint_outside_sink_position_is_ignored() {
    let fa = run(&wrap(
        "    node.on('input', function(msg) {\n      require('fs').writeFileSync(msg.filename, 'x');\n    });",
    ));
    assert!(fa.flows.is_empty());
}

#[test]
fn class_based_node() {
    let src = "module.exports = function(RED) {\n\
               class N {\n\
                 constructor(config) { RED.nodes.createNode(this, config); this.on('input', (msg) => this.handle(msg)); }\n\
                 handle(m) { this.log(m.payload); }\n\
               }\n\
               RED.nodes.registerType('n', N);\n\
               };\n";
    let fa = run(src);
    assert_eq!(pairs(&fa), vec![(3, "listener-input", 4, "node-log")]);
    check_trace(&fa.flows[0]);
}

#[test]
fn sensitive_names_seed_bindings() {
    let fa = run(&wrap("    var apiKey = config.key;\n    console.log('k', apiKey);"));
    assert_eq!(pairs(&fa), vec![(5, "sensitive-name", 6, "console")]);
    // Already sensitive through a direct source: only one source endpoint.
    let fa = run(&wrap("    var password = node.credentials.password;\n    console.log(password);"));
    assert_eq!(pairs(&fa), vec![(5, "credentials-read", 6, "console")]);
}

#[test]
fn callbacks_of_unknown_calls_receive_their_taint() {
    let fa = run(&wrap(
        "    node.on('input', function(msg) {\n      msg.items.forEach(function(item) { node.send(item); });\n    });",
    ));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 6, "node-send")]);
    assert!(fa.flows[0].steps.iter().any(|s| s.rule == Rule::Callback));
}

#[test]
fn recursion_terminates() {
    let fa = run(&wrap(
        "    function r(v, n) { if (n > 0) { return r(v + 1, n - 1); } console.log(v); return v; }\n    node.on('input', function(msg) { node.send(r(msg, 3)); });",
    ));
    let p = pairs(&fa);
    assert!(p.contains(&(6, "listener-input", 5, "console")), "{p:?}");
    assert!(p.contains(&(6, "listener-input", 6, "node-send")), "{p:?}");
    for f in &fa.flows {
        check_trace(f);
    }
}

#[test]
fn depth_cap_warns() {
    let mut src = String::from("function f0(v) { console.log(v); }\n");
    for i in 1..=10 {
        src.push_str(&format!("function f{i}(v) {{ f{}(v); }}\n", i - 1));
    }
    src.push_str("f10(process.env.X);\n");
    let fa = run(&src);
    assert!(fa.flows.is_empty());
    assert!(fa.diagnostics.iter().any(|d| d.message.contains("call depth limit")), "{:?}", fa.diagnostics);

    let mut ok = String::from("function f0(v) { console.log(v); }\n");
    for i in 1..=5 {
        ok.push_str(&format!("function f{i}(v) {{ f{}(v); }}\n", i - 1));
    }
    ok.push_str("f5(process.env.X);\n");
    assert_eq!(run(&ok).flows.len(), 1);
}

#[test]
fn cross_file_call_is_a_warning() {
    let fa = run(&wrap(
        "    var helper = require('./helper');\n    node.on('input', function(msg) { helper.store(msg); });",
    ));
    assert!(fa.flows.is_empty());
    assert!(fa.diagnostics.iter().any(|d| d.message.contains("cross-file")), "{:?}", fa.diagnostics);
}

#[test]
fn destructuring_and_loops() {
    let fa = run(&wrap(
        "    node.on('input', function({ payload }) {\n      for (const p of payload) { node.warn(p); }\n    });",
    ));
    assert_eq!(pairs(&fa), vec![(5, "listener-input", 6, "node-warn")]);
}

#[test]
fn context_store_sink_and_source() {
    let fa = run(&wrap(
        "    var ctx = node.context();\n    var saved = ctx.get('k');\n    ctx.flow.set('other', saved);\n    node.on('input', function(msg) { node.context().set('last', msg); });",
    ));
    let p = pairs(&fa);
    assert!(p.contains(&(8, "listener-input", 8, "context-set")), "{p:?}");
    assert!(p.contains(&(6, "context-get", 7, "store-set")), "{p:?}");
}

#[test]
fn determinism() {
    let src = wrap(
        "    node.on('input', function(msg, send, done) {\n      try { send(msg); } catch (e) { done(e); node.error(e, msg); }\n      console.log(node.credentials.user);\n    });",
    );
    let a = run(&src);
    for _ in 0..5 {
        assert_eq!(run(&src), a);
    }
}

#[test]
fn html_regions_are_analyzed() {
    let html = "<script type=\"text/javascript\">\n  RED.nodes.registerType('n', {defaults: {}, inputs: 1, outputs: 1});\n</script>\n<script type=\"text/javascript\">\n  var password = $('#pw').val();\n  console.log(password);\n</script>\n";
    let tree = parse_file("n.html", html).unwrap();
    let fa = analyze_file(&tree, &Catalog::builtin());
    assert_eq!(pairs(&fa), vec![(5, "sensitive-name", 6, "console")]);
}

#[test]
fn typescript_node() {
    let ts = "import { NodeAPI } from 'node-red';\nexport default function (RED: NodeAPI): void {\n  function N(this: any, config: any) {\n    RED.nodes.createNode(this, config);\n    const node = this;\n    const pw: string = node.credentials.password as string;\n    RED.log.info(`pw ${pw}`);\n  }\n  RED.nodes.registerType('n', N);\n}\n";
    let tree = parse_file("n.ts", ts).unwrap();
    assert!(tree.parse_errors.is_empty(), "{:?}", tree.parse_errors);
    let fa = analyze_file(&tree, &Catalog::builtin());
    assert_eq!(pairs(&fa), vec![(6, "credentials-read", 7, "framework-log")]);
}

#[test]
fn flows_endpoints_are_syntactic_endpoints() {
    let fa = run(&wrap(
        "    node.on('input', function(msg, send) {\n      send(msg);\n      node.status({text: msg.topic});\n      console.log(process.env.PATH);\n    });",
    ));
    assert_eq!(fa.flows.len(), 3);
    for f in &fa.flows {
        assert!(fa.endpoints.contains(&f.source) && fa.endpoints.contains(&f.sink));
        check_trace(f);
    }
}

#[test]
fn sensitive_name_is_not_reseeded_from_source_call() {
    let fa = run(&wrap(
        "    var creds = RED.nodes.getCredentials(config.server);\n    if (!creds) { return; }\n    node.log('user ' + creds.user);",
    ));
    assert_eq!(pairs(&fa), vec![(5, "credentials-lookup", 7, "node-log")]);
}

#[test]
fn aliased_source_is_not_registered_twice() {
    let fa = run(&wrap("    var c = node.credentials;\n    console.log(c.user);"));
    assert_eq!(pairs(&fa), vec![(5, "credentials-read", 6, "console")]);
    let fa = run(&wrap("    var n = node;\n    console.log(n.credentials.user);"));
    assert_eq!(pairs(&fa), vec![(6, "credentials-read", 6, "console")]);
}
