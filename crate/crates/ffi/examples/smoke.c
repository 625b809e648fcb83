/* Preprocesses a JSONL file, trains a small model and prints its scores. */
#include <stdio.h>
#include "topicforge.h"

static int check(TfStatus s, const char *what) {
    if (s != TF_STATUS_OK) {
        const char *msg = tf_last_error();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)s, msg ? msg : "");
        return 1;
    }
    return 0;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s input.jsonl\n", argv[0]);
        return 2;
    }
    TfCorpus *corpus = NULL;
    if (check(tf_corpus_preprocess(argv[1], NULL, 2, &corpus), "preprocess")) return 1;

    size_t docs = 0;
    tf_corpus_stats(corpus, &docs, NULL, NULL);

    TfHyperparams hp = tf_hyperparams_default(3);
    hp.iterations = 50;
    TfModel *model = NULL;
    if (check(tf_model_train(corpus, &hp, &model), "train")) return 1;

    double theta[3];
    if (check(tf_model_doc_topics(model, 0, theta, 3), "doc_topics")) return 1;
    double mean = 0, sd = 0;
    if (check(tf_model_coherence(model, corpus, 10, &mean, &sd), "coherence")) return 1;

    TfModel *bad = NULL;
    hp.num_topics = 0;
    TfStatus s = tf_model_train(corpus, &hp, &bad);

    printf("docs=%zu theta_sum=%.6f coherence=%.3f status_zero_topics=%d\n",
           docs, theta[0] + theta[1] + theta[2], mean, (int)s);
    tf_model_free(model);
    tf_corpus_free(corpus);
    return 0;
}
