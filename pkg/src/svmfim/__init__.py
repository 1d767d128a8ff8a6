"""Frequent-itemset mining with exact miners and classifier-guided candidate pruning."""
from .baselines import (DecisionTreeModel, ForestConfig, RandomForestModel, TreeConfig,
                        predict_class, train_forest, train_tree)
from .miners import (FpTree, FrequentItemsets, MiningConfig, apriori_mine, brute_force_mine,
                     build_fptree, fpgrowth_mine)
from .robustness import NoiseSpec, inject_label_noise, inject_transaction_noise, noise_sweep
from .rules import AssociationRule, RuleConfig, aggregate_topk, generate_rules, rule_metrics
from .svm import (KernelSpec, SolverDiagnostics, SvmConfig, SvmModel, TrainingSet, kernel_eval,
                  svm_decision, svm_train)
from .svmminer import (ClassifierReport, EncoderConfig, ForestClassifier, LabeledCandidate,
                       PipelineConfig, SvmClassifier, TreeClassifier, build_training_set,
                       encode_candidate, evaluate_classifier, item_stats, svm_guided_mine)
from .txdb import (SyntheticSpec, TransactionDb, db5, dump_fimi, gen_synthetic,
                   load_categorical_csv, load_fimi, support)

__version__ = "0.1.0"
