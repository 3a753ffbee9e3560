#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

std::string cascade_classify(const FeatureVector& fv, const CascadeModel& m,
                             CascadeCounters* counters, std::vector<StageOutcome>* trace) {
    if (counters && counters->evaluated.size() < m.stages.size())
        counters->evaluated.resize(m.stages.size(), 0);
    for (std::size_t s = 0; s < m.stages.size(); ++s) {
        const auto& st = m.stages[s];
        const auto x = st.model.extract(fv);
        if (!x)
            throw IncompleteFeaturesError("missing features for stage '" + st.endpoint + "'",
                                          st.endpoint);
        if (counters) ++counters->evaluated[s];
        const int c = st.model.predict(*x);
        const auto& name = st.model.class_names.at(static_cast<std::size_t>(c));
        if (trace) trace->push_back({st.endpoint, name, st.model.score(*x)});
        if (name == st.positive_class) {
            if (counters) ++counters->classified;
            return st.outcome;
        }
    }
    if (counters) ++counters->classified;
    return kDeveloped;
}

nlohmann::json CascadeModel::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : stages)
        j.push_back({{"endpoint", s.endpoint},
                     {"positive_class", s.positive_class},
                     {"outcome", s.outcome},
                     {"model", s.model.to_json()}});
    return {{"type", "cascade"}, {"stages", j}};
}

CascadeModel CascadeModel::from_json(const nlohmann::json& j) {
    if (j.value("type", "") != "cascade") throw SchemaError("not a cascade model");
    CascadeModel m;
    for (const auto& s : j.at("stages"))
        m.stages.push_back({s.at("endpoint").get<std::string>(),
                            s.at("positive_class").get<std::string>(),
                            s.at("outcome").get<std::string>(),
                            BayesModel::from_json(s.at("model"))});
    return m;
}

}  // namespace platescreen::ml
