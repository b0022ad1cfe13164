//! The twelve candidate classifiers behind one train/predict contract:
//! CART decision tree, linear and quadratic discriminant analysis, linear
//! and quadratic-kernel SVM trained by SMO, five k-nearest-neighbor
//! presets, and a feedforward network trained by gradient descent or
//! Levenberg-Marquardt.

pub mod discriminant;
pub mod knn;
pub mod nn;
pub mod svm;
pub mod tree;

pub use discriminant::{discriminant_score, DiscriminantKind, DiscriminantModel};
pub use knn::{knn_vote, KnnMetric, KnnModel, KnnWeighting};
pub use nn::{nn_gradient, Activation, Network};
pub use svm::{smo_train, KernelKind, SmoResult, SvmModel};
pub use tree::{split_score, SplitCriterion, SplitScore, TreeModel};

use crate::preprocess::FeatureMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("dimension mismatch: model expects {expected} features, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("k = {k} exceeds the {n} stored training samples")]
    KTooLarge { k: usize, n: usize },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Numeric(#[from] crate::numkernel::NumError),
}

/// The twelve variants, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    DecisionTree,
    LinearDiscriminant,
    QuadraticDiscriminant,
    LinearSvm,
    QuadraticSvm,
    FineKnn,
    MediumKnn,
    CosineKnn,
    CubicKnn,
    WeightedKnn,
    FfbpnnGd,
    FfbpnnLm,
}

pub const ALL_VARIANTS: [Variant; 12] = [
    Variant::DecisionTree,
    Variant::LinearDiscriminant,
    Variant::QuadraticDiscriminant,
    Variant::LinearSvm,
    Variant::QuadraticSvm,
    Variant::FineKnn,
    Variant::MediumKnn,
    Variant::CosineKnn,
    Variant::CubicKnn,
    Variant::WeightedKnn,
    Variant::FfbpnnGd,
    Variant::FfbpnnLm,
];

impl Variant {
    pub fn canonical_id(&self) -> &'static str {
        match self {
            Variant::DecisionTree => "decision_tree",
            Variant::LinearDiscriminant => "linear_discriminant",
            Variant::QuadraticDiscriminant => "quadratic_discriminant",
            Variant::LinearSvm => "linear_svm",
            Variant::QuadraticSvm => "quadratic_svm",
            Variant::FineKnn => "fine_knn",
            Variant::MediumKnn => "medium_knn",
            Variant::CosineKnn => "cosine_knn",
            Variant::CubicKnn => "cubic_knn",
            Variant::WeightedKnn => "weighted_knn",
            Variant::FfbpnnGd => "ffbpnn_gd",
            Variant::FfbpnnLm => "ffbpnn_lm",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            Variant::DecisionTree => "Decision Tree",
            Variant::LinearDiscriminant => "Linear Discriminant",
            Variant::QuadraticDiscriminant => "Quadratic Discriminant",
            Variant::LinearSvm => "Linear SVM",
            Variant::QuadraticSvm => "Quadratic SVM",
            Variant::FineKnn => "Fine KNN",
            Variant::MediumKnn => "Medium KNN",
            Variant::CosineKnn => "Cosine KNN",
            Variant::CubicKnn => "Cubic KNN",
            Variant::WeightedKnn => "Weighted KNN",
            Variant::FfbpnnGd => "FFBPNN (GD)",
            Variant::FfbpnnLm => "FFBPNN (LM)",
        }
    }

    pub fn from_id(id: &str) -> Option<Variant> {
        ALL_VARIANTS
            .iter()
            .copied()
            .find(|v| v.canonical_id() == id)
    }

    /// Position in canonical report order.
    pub fn canonical_rank(&self) -> usize {
        ALL_VARIANTS.iter().position(|v| v == self).unwrap()
    }

    /// Distance/margin/gradient methods are scale-sensitive; the tree is
    /// split-order invariant and never standardized.
    pub fn wants_standardization(&self) -> bool {
        !matches!(self, Variant::DecisionTree)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: SplitCriterion,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: SplitCriterion::Gini,
            min_leaf: 1,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    /// Total sweep budget for SMO; `None` = 200·n at fit time.
    pub max_passes: Option<usize>,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_passes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub metric: KnnMetric,
    pub weighting: KnnWeighting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnParams {
    pub hidden_units: usize,
    pub activation: Activation,
    pub learning_rate: f64,
    pub gd_max_epochs: usize,
    pub lm_max_epochs: usize,
    pub lm_damping: f64,
    pub lm_factor: f64,
}

impl Default for NnParams {
    fn default() -> Self {
        NnParams {
            hidden_units: 10,
            activation: Activation::Sigmoid,
            learning_rate: 0.05,
            gd_max_epochs: 2000,
            lm_max_epochs: 200,
            lm_damping: 1e-3,
            lm_factor: 10.0,
        }
    }
}

/// Per-family hyperparameters plus the seed driving every stochastic part
/// (weight init, SMO scan order). Irrelevant families are carried with
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub tree: TreeParams,
    pub svm: SvmParams,
    pub knn: KnnParams,
    pub nn: NnParams,
    pub seed: u64,
}

fn knn_preset(variant: Variant) -> KnnParams {
    match variant {
        Variant::FineKnn => KnnParams {
            k: 1,
            metric: KnnMetric::Euclidean,
            weighting: KnnWeighting::Uniform,
        },
        Variant::CosineKnn => KnnParams {
            k: 10,
            metric: KnnMetric::Cosine,
            weighting: KnnWeighting::Uniform,
        },
        Variant::CubicKnn => KnnParams {
            k: 10,
            metric: KnnMetric::Minkowski3,
            weighting: KnnWeighting::Uniform,
        },
        Variant::WeightedKnn => KnnParams {
            k: 10,
            metric: KnnMetric::Euclidean,
            weighting: KnnWeighting::SquaredInverse,
        },
        // medium preset; also the fallback carried by non-KNN variants
        _ => KnnParams {
            k: 10,
            metric: KnnMetric::Euclidean,
            weighting: KnnWeighting::Uniform,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub variant: Variant,
    pub hyperparameters: Hyperparameters,
}

impl ClassifierSpec {
    /// Preset hyperparameters for the given variant with seed 0.
    pub fn new(variant: Variant) -> Self {
        ClassifierSpec {
            variant,
            hyperparameters: Hyperparameters {
                tree: TreeParams::default(),
                svm: SvmParams::default(),
                knn: knn_preset(variant),
                nn: NnParams::default(),
                seed: 0,
            },
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.hyperparameters.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let hp = &self.hyperparameters;
        let bad = |msg: String| Err(ClassifierError::InvalidHyperparameters(msg));
        if hp.tree.min_leaf < 1 {
            return bad("tree.min_leaf must be at least 1".into());
        }
        if hp.svm.c <= 0.0 {
            return bad(format!("svm.c must be positive, got {}", hp.svm.c));
        }
        if !(hp.svm.tol > 0.0 && hp.svm.tol < 1.0) {
            return bad(format!("svm.tol must be in (0, 1), got {}", hp.svm.tol));
        }
        if hp.knn.k < 1 {
            return bad("knn.k must be at least 1".into());
        }
        if hp.nn.hidden_units < 1 {
            return bad("nn.hidden_units must be at least 1".into());
        }
        if hp.nn.learning_rate <= 0.0 {
            return bad(format!(
                "nn.learning_rate must be positive, got {}",
                hp.nn.learning_rate
            ));
        }
        if hp.nn.lm_damping <= 0.0 {
            return bad(format!(
                "nn.lm_damping must be positive, got {}",
                hp.nn.lm_damping
            ));
        }
        if hp.nn.gd_max_epochs < 1 || hp.nn.lm_max_epochs < 1 {
            return bad("nn epoch budgets must be at least 1".into());
        }
        Ok(())
    }
}

/// Family-specific model payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Tree(TreeModel),
    Discriminant(DiscriminantModel),
    Svm(SvmModel),
    Knn(KnnModel),
    Nn(Network),
}

/// A fitted classifier; immutable, serializable, safe to share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub variant: Variant,
    /// false when SMO or LM exhausted its iteration budget.
    pub converged: bool,
    pub n_features: usize,
    pub family: ModelFamily,
}

impl TrainedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }
}

/// Trains the variant named by `spec` on `x`. Deterministic given
/// `spec.hyperparameters.seed`.
pub fn fit(spec: &ClassifierSpec, x: &FeatureMatrix) -> Result<TrainedModel, ClassifierError> {
    spec.validate()?;
    if x.n_rows() == 0 {
        return Err(ClassifierError::DegenerateData(
            "training matrix is empty".into(),
        ));
    }
    let hp = &spec.hyperparameters;
    let n_features = x.n_features();
    let (family, converged) = match spec.variant {
        Variant::DecisionTree => {
            let model = tree::fit_tree(x, &hp.tree);
            (ModelFamily::Tree(model), true)
        }
        Variant::LinearDiscriminant => {
            let model = discriminant::fit_discriminant(x, DiscriminantKind::Linear)?;
            (ModelFamily::Discriminant(model), true)
        }
        Variant::QuadraticDiscriminant => {
            let model = discriminant::fit_discriminant(x, DiscriminantKind::Quadratic)?;
            (ModelFamily::Discriminant(model), true)
        }
        Variant::LinearSvm => {
            let (model, ok) = svm::fit_svm(x, KernelKind::Linear, &hp.svm, hp.seed)?;
            (ModelFamily::Svm(model), ok)
        }
        Variant::QuadraticSvm => {
            let (model, ok) = svm::fit_svm(x, KernelKind::Poly2, &hp.svm, hp.seed)?;
            (ModelFamily::Svm(model), ok)
        }
        Variant::FineKnn
        | Variant::MediumKnn
        | Variant::CosineKnn
        | Variant::CubicKnn
        | Variant::WeightedKnn => {
            let model = knn::fit_knn(x, &hp.knn)?;
            (ModelFamily::Knn(model), true)
        }
        Variant::FfbpnnGd => {
            let model = nn::fit_gd(x, &hp.nn, hp.seed)?;
            (ModelFamily::Nn(model), true)
        }
        Variant::FfbpnnLm => {
            let (model, ok) = nn::fit_lm(x, &hp.nn, hp.seed)?;
            (ModelFamily::Nn(model), ok)
        }
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        variant: spec.variant,
        converged,
        n_features,
        family,
    })
}

/// Predicts a label (true = positive class) for every row of `x`.
pub fn predict(model: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<bool>, ClassifierError> {
    if x.n_rows() > 0 && x.n_features() != model.n_features {
        return Err(ClassifierError::DimensionMismatch {
            expected: model.n_features,
            found: x.n_features(),
        });
    }
    let mut out = Vec::with_capacity(x.n_rows());
    for i in 0..x.n_rows() {
        let row = x.row(i);
        let label = match &model.family {
            ModelFamily::Tree(m) => m.predict_row(row),
            ModelFamily::Discriminant(m) => {
                let scores = discriminant_score(m, row);
                scores[0] >= scores[1]
            }
            ModelFamily::Svm(m) => m.decision_value(row) >= 0.0,
            ModelFamily::Knn(m) => knn_vote(m, row),
            ModelFamily::Nn(m) => m.forward(row) >= 0.5,
        };
        out.push(label);
    }
    Ok(out)
}
