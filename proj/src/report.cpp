#include <algorithm>
#include <array>
#include <sstream>

#include "json.hpp"
#include "mcflab/scenario.hpp"

namespace mcflab {

using ojson = nlohmann::ordered_json;

const std::string& default_expectations_json() {
    static const std::string text = R"({
  "schema": "1",
  "buckets": {
    "csf_pair": {
      "label": "convex pair separates and stays tame",
      "fields": { "monotone_count": true, "t0_detected": "some" }
    },
    "csf_self:figure_eight": {
      "label": "figure-eight loses its crossing monotonically",
      "fields": { "monotone_count": true }
    },
    "csf_self:three_crossing": {
      "label": "three-crossing shadow sheds crossings monotonically",
      "fields": { "monotone_count": true }
    },
    "graphical_pair": {
      "label": "graph difference keeps a tame nodal set",
      "fields": { "monotone_count": true, "note_tag_absent": "count-increase" }
    },
    "marriage_ring": {
      "label": "expected measure increase",
      "expect_violation": true,
      "fields": { "note_tag": "measure-increase" }
    },
    "dumbbell": {
      "label": "expected component transition",
      "expect_violation": true,
      "fields": { "note_tag": "component-transition", "note_tag_absent": "containment-violation" }
    },
    "cone_fattening": {
      "label": "wide cone fattens and the section dimension jumps",
      "expect_violation": true,
      "fields": { "fattening": true, "monotone_dim": false }
    },
    "localizability:circles": {
      "label": "disjoint circles localize",
      "fields": { "note_tag": "localizability-pass" }
    },
    "localizability:dumbbell": {
      "label": "post-pinch dumbbell localizes",
      "fields": { "note_tag": "localizability-pass" }
    },
    "localizability:cone": {
      "label": "cone split breaks localization",
      "expect_violation": true,
      "fields": { "note_tag": ["pieces-touch", "union-mismatch"] }
    },
    "custom": {
      "label": "seeded blob pair stays tame",
      "fields": { "monotone_count": true }
    }
  }
}
)";
    return text;
}

namespace {

std::vector<std::string> tag_list(const ojson& v) {
    std::vector<std::string> out;
    if (v.is_string())
        out.push_back(v.get<std::string>());
    else if (v.is_array())
        for (const auto& e : v) out.push_back(e.get<std::string>());
    return out;
}

bool has_note_tag(const ojson& verdict, const std::string& tag) {
    if (!verdict.contains("notes") || !verdict.at("notes").is_array()) return false;
    for (const auto& n : verdict.at("notes"))
        if (n.is_object() && n.value("tag", "") == tag) return true;
    return false;
}

// Returns the list of field mismatches (empty = expectation met).
std::vector<std::string> check_fields(const ojson& verdict, const ojson& fields) {
    std::vector<std::string> bad;
    for (const auto& item : fields.items()) {
        const std::string& key = item.key();
        const ojson& want = item.value();
        if (key == "note_tag") {
            bool any = false;
            for (const auto& tag : tag_list(want)) any = any || has_note_tag(verdict, tag);
            if (!any) bad.push_back("missing note " + want.dump());
        } else if (key == "note_tag_absent") {
            for (const auto& tag : tag_list(want))
                if (has_note_tag(verdict, tag)) bad.push_back("unexpected note \"" + tag + "\"");
        } else if (key == "t0_detected") {
            const bool want_some = want.is_string() && want.get<std::string>() == "some";
            const bool got_some = verdict.contains(key) && verdict.at(key).is_number();
            if (want_some != got_some)
                bad.push_back(std::string("t0_detected ") + (got_some ? "set" : "missing"));
        } else {
            // Plain tri-state booleans: monotone_dim, monotone_count, fattening.
            const ojson got = verdict.value(key, ojson("n/a"));
            if (got != want)
                bad.push_back(key + "=" + got.dump() + " (want " + want.dump() + ")");
        }
    }
    return bad;
}

}  // namespace

Report emit_report(const std::vector<std::pair<std::string, std::string>>& named_verdicts,
                   const std::string& expectations_json) {
    if (named_verdicts.empty())
        throw SimError("invalid-params", "report needs at least one verdict");
    ojson expect;
    try {
        expect = ojson::parse(expectations_json.empty() ? default_expectations_json()
                                                        : expectations_json);
    } catch (const nlohmann::json::parse_error& e) {
        throw SimError("config-parse", std::string("expectations: ") + e.what());
    }
    if (!expect.contains("buckets") || !expect.at("buckets").is_object())
        throw SimError("config-invalid", "expectations table lacks a buckets object");
    const ojson& buckets = expect.at("buckets");

    Report rep;
    ojson entries = ojson::array();
    std::vector<std::array<std::string, 4>> rows;

    for (const auto& [name, verdict_text] : named_verdicts) {
        std::string scenario = "?", bucket, label;
        std::vector<std::string> reasons;

        ojson v;
        bool parsed = true;
        try {
            v = ojson::parse(verdict_text);
        } catch (const nlohmann::json::parse_error&) {
            parsed = false;
        }
        if (!parsed || !v.is_object()) {
            bucket = "unexpected-fail";
            reasons.push_back("unreadable verdict document");
        } else if (v.contains("error")) {
            scenario = v.at("error").value("code", "internal");
            bucket = "unexpected-fail";
            reasons.push_back("run error: " + v.at("error").value("message", ""));
        } else {
            scenario = v.value("scenario", "?");
            if (!buckets.contains(scenario)) {
                bucket = "unexpected-fail";
                reasons.push_back("no expectation for scenario \"" + scenario + "\"");
            } else {
                const ojson& exp = buckets.at(scenario);
                label = exp.value("label", "");
                reasons = check_fields(v, exp.value("fields", ojson::object()));
                if (!reasons.empty())
                    bucket = "unexpected-fail";
                else
                    bucket = exp.value("expect_violation", false) ? "expected-fail" : "pass";
            }
        }

        if (bucket == "pass")
            ++rep.pass;
        else if (bucket == "expected-fail")
            ++rep.expected_fail;
        else
            ++rep.unexpected_fail;

        ojson ent;
        ent["name"] = name;
        ent["scenario"] = scenario;
        ent["bucket"] = bucket;
        if (!label.empty()) ent["label"] = label;
        ent["reasons"] = reasons;
        entries.push_back(ent);

        std::string why = label;
        for (const auto& r : reasons) why += (why.empty() ? "" : "; ") + r;
        rows.push_back({name, scenario, bucket, why.empty() ? "-" : why});
    }

    ojson j;
    j["schema"] = "1";
    j["counts"] = ojson{{"pass", rep.pass},
                        {"expected_fail", rep.expected_fail},
                        {"unexpected_fail", rep.unexpected_fail}};
    j["entries"] = entries;
    rep.json = j.dump(2) + "\n";

    std::array<size_t, 3> wcol{4, 8, 6};
    for (const auto& r : rows)
        for (int c = 0; c < 3; ++c) wcol[c] = std::max(wcol[c], r[c].size());
    std::ostringstream tb;
    auto pad = [&](const std::string& s, size_t w) {
        tb << s << std::string(w - s.size() + 2, ' ');
    };
    pad("name", wcol[0]);
    pad("scenario", wcol[1]);
    pad("bucket", wcol[2]);
    tb << "notes\n";
    for (const auto& r : rows) {
        pad(r[0], wcol[0]);
        pad(r[1], wcol[1]);
        pad(r[2], wcol[2]);
        tb << r[3] << '\n';
    }
    tb << "totals: " << rep.pass << " pass, " << rep.expected_fail << " expected-fail, "
       << rep.unexpected_fail << " unexpected-fail\n";
    rep.table = tb.str();
    return rep;
}

}  // namespace mcflab
