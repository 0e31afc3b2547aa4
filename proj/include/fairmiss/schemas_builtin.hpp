#pragma once

// Frozen dataset schemas, also shipped as editable copies under schemas/.
// A unit test asserts the shipped files stay byte-identical to these strings.

namespace fairmiss::builtin {

inline constexpr const char* german_schema_json = R"json({
  "id": "german",
  "expected_rows": 1000,
  "columns": [
    {"name": "checking_status", "kind": "categorical", "role": "predictor",
     "levels": ["A11", "A12", "A13", "A14"], "ordinal": [0, 1, 2, 3]},
    {"name": "duration", "kind": "numeric", "role": "predictor"},
    {"name": "credit_history", "kind": "categorical", "role": "predictor",
     "levels": ["A30", "A31", "A32", "A33", "A34"], "ordinal": [0, 1, 2, 3, 4]},
    {"name": "purpose", "kind": "categorical", "role": "predictor",
     "levels": ["A40", "A41", "A410", "A42", "A43", "A44", "A45", "A46", "A48", "A49"]},
    {"name": "credit_amount", "kind": "numeric", "role": "predictor"},
    {"name": "savings_status", "kind": "categorical", "role": "predictor",
     "levels": ["A61", "A62", "A63", "A64", "A65"]},
    {"name": "employment", "kind": "categorical", "role": "predictor",
     "levels": ["A71", "A72", "A73", "A74", "A75"]},
    {"name": "installment_rate", "kind": "numeric", "role": "predictor"},
    {"name": "sex", "kind": "categorical", "role": "sensitive",
     "levels": ["male", "female"]},
    {"name": "other_debtors", "kind": "categorical", "role": "predictor",
     "levels": ["A101", "A102", "A103"]},
    {"name": "residence_since", "kind": "numeric", "role": "predictor"},
    {"name": "property", "kind": "categorical", "role": "predictor",
     "levels": ["A121", "A122", "A123", "A124"]},
    {"name": "age", "kind": "numeric", "role": "sensitive"},
    {"name": "other_installment_plans", "kind": "categorical", "role": "predictor",
     "levels": ["A141", "A142", "A143"]},
    {"name": "housing", "kind": "categorical", "role": "predictor",
     "levels": ["A151", "A152", "A153"]},
    {"name": "existing_credits", "kind": "numeric", "role": "predictor"},
    {"name": "job", "kind": "categorical", "role": "predictor",
     "levels": ["A171", "A172", "A173", "A174"]},
    {"name": "num_dependents", "kind": "numeric", "role": "predictor"},
    {"name": "telephone", "kind": "categorical", "role": "predictor",
     "levels": ["A191", "A192"]},
    {"name": "foreign_worker", "kind": "categorical", "role": "predictor",
     "levels": ["A201", "A202"]},
    {"name": "credit_risk", "kind": "categorical", "role": "outcome",
     "levels": ["good", "bad"]}
  ],
  "outcome": {"column": "credit_risk", "positive": "good"},
  "sensitive_variants": [
    {"name": "sex", "column": "sex", "privileged_levels": ["male"]},
    {"name": "age", "column": "age", "threshold": 25}
  ],
  "amputed_variables": ["checking_status", "credit_history"]
})json";

inline constexpr const char* adult_schema_json = R"json({
  "id": "adult",
  "expected_rows": 45222,
  "columns": [
    {"name": "age", "kind": "numeric", "role": "predictor"},
    {"name": "workclass", "kind": "categorical", "role": "predictor",
     "levels": ["Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
                "Local-gov", "State-gov", "Without-pay", "Never-worked"]},
    {"name": "education", "kind": "categorical", "role": "predictor",
     "levels": ["Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
                "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
                "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"]},
    {"name": "education_num", "kind": "numeric", "role": "predictor"},
    {"name": "marital_status", "kind": "categorical", "role": "predictor",
     "levels": ["Married-civ-spouse", "Divorced", "Never-married", "Separated",
                "Widowed", "Married-spouse-absent", "Married-AF-spouse"]},
    {"name": "occupation", "kind": "categorical", "role": "predictor",
     "levels": ["Tech-support", "Craft-repair", "Other-service", "Sales",
                "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
                "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
                "Transport-moving", "Priv-house-serv", "Protective-serv",
                "Armed-Forces"]},
    {"name": "relationship", "kind": "categorical", "role": "predictor",
     "levels": ["Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
                "Unmarried"]},
    {"name": "race", "kind": "categorical", "role": "sensitive",
     "levels": ["White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
                "Black"]},
    {"name": "sex", "kind": "categorical", "role": "sensitive",
     "levels": ["Male", "Female"]},
    {"name": "capital_gain", "kind": "numeric", "role": "predictor"},
    {"name": "capital_loss", "kind": "numeric", "role": "predictor"},
    {"name": "hours_per_week", "kind": "numeric", "role": "predictor"},
    {"name": "native_country", "kind": "categorical", "role": "predictor",
     "levels": ["United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
                "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan", "Greece",
                "South", "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
                "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland",
                "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti",
                "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland",
                "Thailand", "Yugoslavia", "El-Salvador", "Trinadad&Tobago", "Peru",
                "Hong", "Holand-Netherlands"]},
    {"name": "income", "kind": "categorical", "role": "outcome",
     "levels": ["<=50K", ">50K"]}
  ],
  "outcome": {"column": "income", "positive": ">50K"},
  "sensitive_variants": [
    {"name": "sex", "column": "sex", "privileged_levels": ["Male"]},
    {"name": "race", "column": "race", "privileged_levels": ["White"]}
  ],
  "amputed_variables": ["capital_gain"]
})json";

inline constexpr const char* compas_schema_json = R"json({
  "id": "compas",
  "expected_rows": 7214,
  "columns": [
    {"name": "sex", "kind": "categorical", "role": "sensitive",
     "levels": ["Female", "Male"]},
    {"name": "age", "kind": "numeric", "role": "predictor"},
    {"name": "age_cat", "kind": "categorical", "role": "predictor",
     "levels": ["Less than 25", "25 - 45", "Greater than 45"]},
    {"name": "race", "kind": "categorical", "role": "sensitive",
     "levels": ["African-American", "Asian", "Caucasian", "Hispanic",
                "Native American", "Other"]},
    {"name": "juv_fel_count", "kind": "numeric", "role": "predictor"},
    {"name": "juv_misd_count", "kind": "numeric", "role": "predictor"},
    {"name": "juv_other_count", "kind": "numeric", "role": "predictor"},
    {"name": "priors_count", "kind": "numeric", "role": "predictor"},
    {"name": "c_charge_degree", "kind": "categorical", "role": "predictor",
     "levels": ["F", "M"]},
    {"name": "decile_score", "kind": "numeric", "role": "predictor"},
    {"name": "score_text", "kind": "categorical", "role": "predictor",
     "levels": ["Low", "Medium", "High"], "ordinal": [0, 1, 2]},
    {"name": "two_year_recid", "kind": "categorical", "role": "outcome",
     "levels": ["0", "1"]}
  ],
  "outcome": {"column": "two_year_recid", "positive": "0"},
  "sensitive_variants": [
    {"name": "sex", "column": "sex", "privileged_levels": ["Female"]},
    {"name": "race", "column": "race", "privileged_levels": ["Caucasian"]}
  ],
  "amputed_variables": ["age", "score_text"]
})json";

}  // namespace fairmiss::builtin
