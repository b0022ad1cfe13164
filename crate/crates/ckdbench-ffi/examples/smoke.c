#include <stdio.h>
#include <string.h>
#include "ckdbench.h"

int main(void) {
    CkdbStatus status;
    CkdbDataset *ds = ckdb_dataset_load("data/chronic_kidney_disease_full.arff",
                                        CKDB_DATA_FORMAT_ARFF, &status);
    if (!ds || status != CKDB_STATUS_OK) {
        char *err = ckdb_last_error_message();
        fprintf(stderr, "load failed: %s\n", err ? err : "(no message)");
        ckdb_string_free(err);
        return 1;
    }
    unsigned long long rows = (unsigned long long)ckdb_dataset_rows(ds);
    char *summary = ckdb_dataset_summary_json(ds);
    int ok = rows == 400 && summary && strstr(summary, "\"positive_count\": 250") != NULL;
    printf("rows=%llu summary_ok=%d\n", rows, ok);
    ckdb_string_free(summary);
    ckdb_dataset_free(ds);
    char *schema = ckdb_schema_json();
    ok = ok && schema && strstr(schema, "\"ckd\"") != NULL;
    ckdb_string_free(schema);
    printf(ok ? "C SMOKE PASS\n" : "C SMOKE FAIL\n");
    return ok ? 0 : 1;
}
