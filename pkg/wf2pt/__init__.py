from wf2pt.reduction import WorkflowNetReducer, reduce_to_tree
